// Licensed under the Apache License, Version 2.0 (the "License"); you
// may not use this file except in compliance with the License.  You
// may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied.  See the License for the specific language governing
// permissions and limitations under the License.

#pragma once

#include "qritz/types.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace qritz {

// Direction numbers in the Joe-Kuo text format: one line per dimension,
// "d s a m_1 ... m_s".  Dimension 1 is the dyadic van der Corput column
// set and is built in, not read from the file.
class DirectionTable {
public:
    static constexpr int kBits = 32;

    explicit DirectionTable(const std::string& path);

    // Resolution order: explicit path, QRITZ_SOBOL_TABLE env var, the
    // compiled-in default (the checked-in data asset).
    static std::shared_ptr<const DirectionTable> load_default();

    Index max_dimension() const { return static_cast<Index>(columns_.size()); }

    // 32 direction-number columns of dimension `dim` (1-based).
    const std::uint32_t* columns(Index dim) const;

private:
    std::vector<std::array<std::uint32_t, kBits>> columns_;
};

// Deterministic cursor into the Sobol sequence.  Point 0 (the origin) is
// always skipped: a freshly constructed stream emits points 1, 2, ...
// Advancing is O(K) per point through the Gray-code update; seeking to an
// arbitrary index is O(K log N).
class SobolSequence {
public:
    SobolSequence(Index dim, std::shared_ptr<const DirectionTable> table);

    static SobolSequence at_index(Index dim, std::uint64_t start_index,
                                  std::shared_ptr<const DirectionTable> table);

    Index dim() const { return dim_; }
    std::uint64_t index() const { return index_; }

    // Next N points of the sequence, one per column, all in [0,1)^K.
    Matrix next(Index n);

    void seek(std::uint64_t index);

private:
    Index dim_ = 0;
    std::uint64_t index_ = 0; // last emitted index; 0 means "before the first point"
    std::vector<std::uint32_t> current_;
    std::shared_ptr<const DirectionTable> table_;
};

} // namespace qritz
