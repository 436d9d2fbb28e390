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

#include "qritz/sobol.hpp"

#include "qritz/errors.hpp"

#include <array>
#include <bit>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>

#ifndef QRITZ_DEFAULT_SOBOL_TABLE
#define QRITZ_DEFAULT_SOBOL_TABLE ""
#endif

namespace qritz {

DirectionTable::DirectionTable(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open direction-number table: " + path);

    // dimension 1: dyadic columns v_j = 2^{-(j+1)}
    std::array<std::uint32_t, kBits> dim1{};
    for (int j = 0; j < kBits; ++j) dim1[static_cast<std::size_t>(j)] = 1u << (kBits - 1 - j);
    columns_.push_back(dim1);

    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        long long d = 0;
        if (!(row >> d)) continue; // header or comment line
        int s = 0;
        std::uint32_t a = 0;
        row >> s >> a;
        if (d != static_cast<long long>(columns_.size()) + 1 || s < 1 || s >= kBits) {
            throw ConfigError("malformed direction-number line: " + line);
        }
        std::vector<std::uint32_t> m(static_cast<std::size_t>(s));
        for (auto& mi : m) {
            if (!(row >> mi)) throw ConfigError("truncated direction-number line: " + line);
        }
        for (std::size_t j = 0; j < m.size(); ++j) {
            if (m[j] % 2 == 0 || m[j] >= (1u << (j + 1))) {
                throw ConfigError("invalid initial direction number in line: " + line);
            }
        }
        std::array<std::uint32_t, kBits> v{};
        for (int j = 0; j < s; ++j) {
            v[static_cast<std::size_t>(j)] = m[static_cast<std::size_t>(j)] << (kBits - 1 - j);
        }
        for (int j = s; j < kBits; ++j) {
            std::uint32_t x = v[static_cast<std::size_t>(j - s)];
            x ^= x >> s;
            for (int t = 1; t < s; ++t) {
                if ((a >> (s - 1 - t)) & 1u) x ^= v[static_cast<std::size_t>(j - t)];
            }
            v[static_cast<std::size_t>(j)] = x;
        }
        columns_.push_back(v);
    }
    if (columns_.size() < 2) {
        throw ConfigError("direction-number table has no dimension rows: " + path);
    }
}

std::shared_ptr<const DirectionTable> DirectionTable::load_default()
{
    static std::mutex mu;
    static std::shared_ptr<const DirectionTable> cached;
    std::lock_guard<std::mutex> lock(mu);
    if (!cached) {
        std::string path = QRITZ_DEFAULT_SOBOL_TABLE;
        if (const char* env = std::getenv("QRITZ_SOBOL_TABLE"); env != nullptr && *env != '\0') {
            path = env;
        }
        cached = std::make_shared<const DirectionTable>(path);
    }
    return cached;
}

const std::uint32_t* DirectionTable::columns(Index dim) const
{
    if (dim < 1 || dim > max_dimension()) {
        throw ConfigError("Sobol dimension " + std::to_string(dim)
                          + " exceeds direction-number table (max "
                          + std::to_string(max_dimension()) + ")");
    }
    return columns_[static_cast<std::size_t>(dim - 1)].data();
}

SobolSequence::SobolSequence(Index dim, std::shared_ptr<const DirectionTable> table)
    : dim_(dim), current_(static_cast<std::size_t>(dim), 0u), table_(std::move(table))
{
    if (dim < 1) throw ConfigError("Sobol dimension must be >= 1");
    table_->columns(dim); // validates against the table
}

SobolSequence SobolSequence::at_index(Index dim, std::uint64_t start_index,
                                      std::shared_ptr<const DirectionTable> table)
{
    SobolSequence seq(dim, std::move(table));
    seq.seek(start_index);
    return seq;
}

void SobolSequence::seek(std::uint64_t index)
{
    if (index >= (1ull << DirectionTable::kBits)) {
        throw ConfigError("Sobol index exceeds 32-bit resolution");
    }
    index_ = index;
    const std::uint64_t gray = index ^ (index >> 1);
    for (Index d = 0; d < dim_; ++d) {
        const std::uint32_t* v = table_->columns(d + 1);
        std::uint32_t x = 0;
        for (int b = 0; b < DirectionTable::kBits; ++b) {
            if ((gray >> b) & 1ull) x ^= v[b];
        }
        current_[static_cast<std::size_t>(d)] = x;
    }
}

Matrix SobolSequence::next(Index n)
{
    if (n < 0) throw ConfigError("point count must be non-negative");
    Matrix out(dim_, n);
    if (n == 0) return out;
    if (index_ + static_cast<std::uint64_t>(n) >= (1ull << DirectionTable::kBits)) {
        throw ConfigError("Sobol stream exhausts 32-bit resolution");
    }
    constexpr double scale = 0x1.0p-32;
    for (Index i = 0; i < n; ++i) {
        // Gray-code step: flip the column of the lowest zero bit of index_.
        const int c = std::countr_one(index_);
        for (Index d = 0; d < dim_; ++d) {
            current_[static_cast<std::size_t>(d)] ^= table_->columns(d + 1)[c];
            out(d, i) = static_cast<double>(current_[static_cast<std::size_t>(d)]) * scale;
        }
        ++index_;
    }
    return out;
}

} // namespace qritz
