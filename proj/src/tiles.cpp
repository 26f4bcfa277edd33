#include "airq/tiles.hpp"

#include <cmath>
#include <fstream>

#include "airq/csv.hpp"
#include "airq/errors.hpp"

namespace airq {

std::uint64_t GridSpec::hash() const {
    const std::string canon = csv::format_double(lat0) + "|" + csv::format_double(lon0) + "|" +
                              csv::format_double(dlat) + "|" + csv::format_double(dlon) + "|" +
                              std::to_string(nlat) + "|" + std::to_string(nlon);
    std::uint64_t h = 14695981039346656037ull;
    for (char c : canon) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

std::vector<GridCell> make_grid(const GridSpec& spec) {
    std::vector<GridCell> cells;
    cells.reserve(spec.cell_count());
    for (int i = 0; i < spec.nlat; ++i) {
        for (int j = 0; j < spec.nlon; ++j) {
            cells.push_back(GridCell{i, j, spec.lat_at(i), spec.lon_at(j)});
        }
    }
    return cells;
}

std::string to_string(TileKind k) {
    switch (k) {
        case TileKind::Point: return "point";
        case TileKind::Q05: return "q05";
        case TileKind::Q50: return "q50";
        case TileKind::Q95: return "q95";
        case TileKind::Index: return "index";
        case TileKind::IndexSum: return "index_sum";
        case TileKind::Driving: return "driving";
    }
    return "?";
}

TileKind tile_kind_from_string(const std::string& s) {
    for (TileKind k : {TileKind::Point, TileKind::Q05, TileKind::Q50, TileKind::Q95,
                       TileKind::Index, TileKind::IndexSum, TileKind::Driving}) {
        if (s == to_string(k)) return k;
    }
    throw ParseError("unknown tile kind: '" + s + "'");
}

double PredictionTile::completeness() const {
    if (values.empty()) return 0.0;
    std::size_t present = 0;
    for (float v : values) {
        if (v != missing) ++present;
    }
    return static_cast<double>(present) / static_cast<double>(values.size());
}

void PredictionTile::validate() const {
    if (values.size() != spec.cell_count()) {
        throw ValidationError("tile payload size does not match grid spec");
    }
    for (float v : values) {
        if (std::isnan(v) || std::isinf(v)) throw ValidationError("tile contains non-finite value");
    }
}

void write_tile(const PredictionTile& tile, const std::string& path) {
    tile.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << "pollutant=" << to_string(tile.pollutant) << "\n";
    out << "timestamp=" << format_rfc3339(tile.timestamp) << "\n";
    out << "kind=" << to_string(tile.kind) << "\n";
    out << "gridspec_hash=" << tile.spec.hash() << "\n";
    out << "missing=" << csv::format_double(tile.missing) << "\n";
    out.write(reinterpret_cast<const char*>(tile.values.data()),
              static_cast<std::streamsize>(tile.values.size() * sizeof(float)));
    if (!out) throw IoError("short write to " + path);
}

namespace {

std::string tile_header(std::istream& in, const std::string& key, const std::string& path) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": truncated tile header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string prefix = key + "=";
    if (line.rfind(prefix, 0) != 0) throw ParseError(path + ": expected '" + key + "=' line");
    return line.substr(prefix.size());
}

}  // namespace

PredictionTile read_tile(const std::string& path, const GridSpec& expected) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    PredictionTile tile;
    tile.spec = expected;
    tile.pollutant = pollutant_from_string(tile_header(in, "pollutant", path));
    tile.timestamp = parse_rfc3339_hour(tile_header(in, "timestamp", path));
    tile.kind = tile_kind_from_string(tile_header(in, "kind", path));
    const std::uint64_t hash = csv::parse_uint(tile_header(in, "gridspec_hash", path));
    if (hash != expected.hash()) {
        throw ValidationError(path + ": gridspec hash mismatch (incompatible grid)");
    }
    tile.missing = static_cast<float>(csv::parse_double(tile_header(in, "missing", path)));
    const std::size_t n = expected.cell_count();
    tile.values.resize(n);
    in.read(reinterpret_cast<char*>(tile.values.data()),
            static_cast<std::streamsize>(n * sizeof(float)));
    if (static_cast<std::size_t>(in.gcount()) != n * sizeof(float)) {
        throw ParseError(path + ": truncated tile payload");
    }
    return tile;
}

void write_tile_csv(const PredictionTile& tile, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "lat,lon,value\n";
    for (int i = 0; i < tile.spec.nlat; ++i) {
        for (int j = 0; j < tile.spec.nlon; ++j) {
            const float v = tile.at(i, j);
            if (v == tile.missing) continue;
            out << csv::format_double(tile.spec.lat_at(i)) << ','
                << csv::format_double(tile.spec.lon_at(j)) << ','
                << csv::format_double(v) << "\n";
        }
    }
}

}  // namespace airq
