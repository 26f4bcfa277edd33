#include "airq/daqi.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "airq/csv.hpp"
#include "airq/errors.hpp"

namespace airq {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void DaqiTable::set_bands(Pollutant p, const std::array<double, 10>& bounds) {
    for (int i = 1; i < 10; ++i) {
        if (!(bounds[i] > bounds[i - 1])) {
            throw ValidationError("DAQI bounds for " + to_string(p) +
                                  " are not strictly increasing");
        }
    }
    if (bounds[9] != kInf) {
        throw ValidationError("DAQI band 10 for " + to_string(p) + " must be unbounded");
    }
    bands_[p] = bounds;
}

bool DaqiTable::has(Pollutant p) const { return bands_.count(p) > 0; }

int DaqiTable::subindex(Pollutant p, double concentration) const {
    if (!(concentration >= 0.0) || !std::isfinite(concentration)) {
        throw ValidationError("subindex: concentration must be finite and >= 0");
    }
    const auto it = bands_.find(p);
    if (it == bands_.end()) throw ConfigError("DAQI table has no bands for " + to_string(p));
    const auto& b = it->second;
    for (int i = 0; i < 10; ++i) {
        if (concentration <= b[i]) return i + 1;
    }
    return 10;
}

const std::array<double, 10>& DaqiTable::bands(Pollutant p) const {
    const auto it = bands_.find(p);
    if (it == bands_.end()) throw ConfigError("DAQI table has no bands for " + to_string(p));
    return it->second;
}

DaqiTable DaqiTable::from_csv(const std::string& path) {
    const auto rows = csv::read_file(path);
    if (rows.empty() || rows[0] != std::vector<std::string>{"pollutant", "band", "upper_bound"}) {
        throw ParseError(path + ": expected header pollutant,band,upper_bound");
    }
    std::map<Pollutant, std::array<double, 10>> collected;
    std::map<Pollutant, int> seen_count;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != 3) throw ParseError(path + ": wrong field count");
        const Pollutant p = pollutant_from_string(rows[i][0]);
        const int band = static_cast<int>(csv::parse_int(rows[i][1]));
        if (band < 1 || band > 10) throw ParseError(path + ": band must be 1..10");
        const double bound = rows[i][2] == "inf" ? kInf : csv::parse_double(rows[i][2]);
        collected[p][band - 1] = bound;
        seen_count[p] += 1;
    }
    DaqiTable table;
    for (const auto& [p, bounds] : collected) {
        if (seen_count[p] != 10) {
            throw ParseError(path + ": " + to_string(p) + " needs exactly 10 bands");
        }
        table.set_bands(p, bounds);
    }
    return table;
}

void DaqiTable::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "pollutant,band,upper_bound\n";
    for (const auto& [p, bounds] : bands_) {
        for (int i = 0; i < 10; ++i) {
            out << to_string(p) << ',' << (i + 1) << ','
                << (bounds[i] == kInf ? std::string("inf") : csv::format_double(bounds[i]))
                << "\n";
        }
    }
}

DaqiTable DaqiTable::uk_default() {
    DaqiTable t;
    t.set_bands(Pollutant::NO2, {67, 134, 200, 267, 334, 400, 467, 534, 600, kInf});
    t.set_bands(Pollutant::O3, {33, 66, 100, 120, 140, 160, 187, 213, 240, kInf});
    t.set_bands(Pollutant::PM10, {16, 33, 50, 58, 66, 75, 83, 91, 100, kInf});
    t.set_bands(Pollutant::PM2_5, {11, 23, 35, 41, 47, 53, 58, 64, 70, kInf});
    t.set_bands(Pollutant::SO2, {88, 177, 266, 354, 443, 532, 710, 887, 1064, kInf});
    return t;
}

int overall_index(const std::vector<int>& subindices) {
    if (subindices.empty()) throw ValidationError("overall_index: no subindices");
    int best = 1;
    for (int s : subindices) {
        if (s < 1 || s > 10) throw ValidationError("overall_index: subindex out of range");
        best = std::max(best, s);
    }
    return best;
}

std::string band_group(int index) {
    if (index <= 3) return "Low";
    if (index <= 6) return "Moderate";
    if (index <= 9) return "High";
    return "Very High";
}

namespace {

void require_same_geometry(const std::vector<PredictionTile>& tiles) {
    if (tiles.empty()) throw ValidationError("no tiles supplied");
    for (const auto& t : tiles) {
        if (!(t.spec == tiles.front().spec)) {
            throw ValidationError("tile geometry mismatch");
        }
    }
}

}  // namespace

PredictionTile subindex_tile(const PredictionTile& concentration, const DaqiTable& table) {
    PredictionTile out = concentration;
    out.kind = TileKind::Index;
    for (float& v : out.values) {
        if (v == concentration.missing) continue;
        v = static_cast<float>(table.subindex(concentration.pollutant, v));
    }
    return out;
}

PredictionTile overall_index_tile(const std::vector<PredictionTile>& subindex_tiles) {
    require_same_geometry(subindex_tiles);
    PredictionTile out = subindex_tiles.front();
    out.kind = TileKind::Index;
    for (std::size_t c = 0; c < out.values.size(); ++c) {
        float best = out.missing;
        for (const auto& t : subindex_tiles) {
            const float v = t.values[c];
            if (v == t.missing) continue;
            if (best == out.missing || v > best) best = v;
        }
        out.values[c] = best;
    }
    return out;
}

PredictionTile annual_summation(const std::vector<PredictionTile>& index_tiles) {
    require_same_geometry(index_tiles);
    PredictionTile out = index_tiles.front();
    out.kind = TileKind::IndexSum;
    for (std::size_t c = 0; c < out.values.size(); ++c) {
        float sum = 0.0f;
        bool missing = false;
        for (const auto& t : index_tiles) {
            if (t.values[c] == t.missing) {
                missing = true;
                break;
            }
            sum += t.values[c];
        }
        out.values[c] = missing ? out.missing : sum;
    }
    return out;
}

PredictionTile driving_subindex(const std::vector<PredictionTile>& summations_per_pollutant) {
    require_same_geometry(summations_per_pollutant);

    // Cell values hold the canonical pollutant index (position in
    // all_pollutants()), and ties resolve in that fixed order no matter how
    // the input tiles are arranged.
    std::vector<std::size_t> order(summations_per_pollutant.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    auto canonical_rank = [&](std::size_t i) {
        const auto& all = all_pollutants();
        for (std::size_t r = 0; r < all.size(); ++r) {
            if (all[r] == summations_per_pollutant[i].pollutant) return r;
        }
        return all.size();
    };
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return canonical_rank(a) < canonical_rank(b); });

    PredictionTile out = summations_per_pollutant.front();
    out.kind = TileKind::Driving;
    for (std::size_t c = 0; c < out.values.size(); ++c) {
        int best = -1;
        float best_sum = 0.0f;
        for (std::size_t i : order) {
            const auto& t = summations_per_pollutant[i];
            if (t.values[c] == t.missing) continue;
            if (best < 0 || t.values[c] > best_sum) {
                best = static_cast<int>(canonical_rank(i));
                best_sum = t.values[c];
            }
        }
        out.values[c] = best < 0 ? out.missing : static_cast<float>(best);
    }
    return out;
}

}  // namespace airq
