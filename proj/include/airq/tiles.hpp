#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "airq/station.hpp"
#include "airq/time.hpp"

namespace airq {

// Cell-center registered regular grid. The default is the global 0.25 degree
// grid: 720 x 1440 = 1,036,800 cells, centers -89.875..89.875 and
// -179.875..179.875 (half-cell offset avoids duplicate antimeridian columns).
struct GridSpec {
    double lat0 = -89.875;
    double lon0 = -179.875;
    double dlat = 0.25;
    double dlon = 0.25;
    int nlat = 720;
    int nlon = 1440;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;

    std::size_t cell_count() const {
        return static_cast<std::size_t>(nlat) * static_cast<std::size_t>(nlon);
    }
    double lat_at(int i) const { return lat0 + dlat * i; }
    double lon_at(int j) const { return lon0 + dlon * j; }

    // FNV-1a over the canonical geometry string; stored in tile headers so a
    // reader can refuse tiles from a different grid.
    std::uint64_t hash() const;

    static GridSpec global_quarter_degree() { return {}; }
};

struct GridCell {
    int ilat = 0;
    int ilon = 0;
    double lat = 0.0;
    double lon = 0.0;
};

// The 1,036,800 cells (for the default spec) in deterministic lat-major order.
std::vector<GridCell> make_grid(const GridSpec& spec);

enum class TileKind { Point, Q05, Q50, Q95, Index, IndexSum, Driving };

std::string to_string(TileKind k);
TileKind tile_kind_from_string(const std::string& s);

// One pollutant x one hour x grid of values, lat-major. float32 to match the
// on-disk payload bit for bit.
struct PredictionTile {
    Pollutant pollutant = Pollutant::NO2;
    UtcHour timestamp;
    TileKind kind = TileKind::Point;
    GridSpec spec;
    float missing = -9999.0f;
    std::vector<float> values;  // size = spec.cell_count()

    float at(int ilat, int ilon) const { return values[static_cast<std::size_t>(ilat) * spec.nlon + ilon]; }
    float& at(int ilat, int ilon) { return values[static_cast<std::size_t>(ilat) * spec.nlon + ilon]; }

    // Fraction of cells carrying a real value.
    double completeness() const;

    void validate() const;
};

// aptile v1: five text header lines (pollutant=, timestamp=, kind=,
// gridspec_hash=, missing=) then a little-endian float32 payload, lat-major.
void write_tile(const PredictionTile& tile, const std::string& path);

// `expected` guards against reading a tile from another geometry; the header
// only stores the hash, so the caller supplies the spec.
PredictionTile read_tile(const std::string& path, const GridSpec& expected);

// CSV export lat,lon,value for plotting; missing cells are skipped.
void write_tile_csv(const PredictionTile& tile, const std::string& path);

}  // namespace airq
