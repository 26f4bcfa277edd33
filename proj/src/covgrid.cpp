#include "airq/covgrid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "airq/csv.hpp"
#include "airq/errors.hpp"

namespace airq {

namespace {

// Snap near-integer grid coordinates so queries at exact cell centers are
// exact despite floating-point division noise.
double snap(double x) {
    const double r = std::round(x);
    return std::abs(x - r) < 1e-9 ? r : x;
}

}  // namespace

std::size_t CovariateGrid::time_slice_at(UtcHour t) const {
    if (times.empty() || t < times.front()) {
        throw OutOfDomainError("grid '" + name + "': query time before first slice");
    }
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    return static_cast<std::size_t>(it - times.begin()) - 1;
}

void CovariateGrid::validate() const {
    if (nlat <= 0 || nlon <= 0) throw ValidationError("grid '" + name + "': empty geometry");
    if (dlat <= 0.0 || dlon <= 0.0) throw ValidationError("grid '" + name + "': bad spacing");
    if (times.empty()) throw ValidationError("grid '" + name + "': no time slices");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i - 1] < times[i])) {
            throw ValidationError("grid '" + name + "': times not strictly increasing");
        }
    }
    if (values.size() != times.size() * static_cast<std::size_t>(nlat) * nlon) {
        throw ValidationError("grid '" + name + "': payload size mismatch");
    }
}

bool GridSliceView::interpolate(double lat, double lon, double& out) const {
    const CovariateGrid& g = *grid;
    const double y = snap((lat - g.lat0) / g.dlat);
    const double x = snap((lon - g.lon0) / g.dlon);
    if (y < 0.0 || y > g.nlat - 1 || x < 0.0 || x > g.nlon - 1) return false;

    int i0 = static_cast<int>(y);
    int j0 = static_cast<int>(x);
    if (i0 > g.nlat - 2) i0 = std::max(0, g.nlat - 2);
    if (j0 > g.nlon - 2) j0 = std::max(0, g.nlon - 2);
    const double fy = y - i0;
    const double fx = x - j0;

    const int i1 = std::min(i0 + 1, g.nlat - 1);
    const int j1 = std::min(j0 + 1, g.nlon - 1);

    const float v[4] = {slice[i0 * g.nlon + j0], slice[i0 * g.nlon + j1],
                        slice[i1 * g.nlon + j0], slice[i1 * g.nlon + j1]};
    const double w[4] = {(1.0 - fy) * (1.0 - fx), (1.0 - fy) * fx, fy * (1.0 - fx), fy * fx};

    double acc = 0.0, wsum = 0.0;
    for (int k = 0; k < 4; ++k) {
        if (v[k] == g.missing) continue;
        acc += w[k] * v[k];
        wsum += w[k];
    }
    if (wsum == 0.0) return false;
    out = acc / wsum;
    return true;
}

GridSliceView slice_view(const CovariateGrid& g, UtcHour t) {
    const std::size_t ti = g.time_slice_at(t);
    return GridSliceView{&g, g.values.data() + ti * static_cast<std::size_t>(g.nlat) * g.nlon};
}

double interpolate_grid(const CovariateGrid& g, double lat, double lon, UtcHour t) {
    const GridSliceView view = slice_view(g, t);
    const double y = (lat - g.lat0) / g.dlat;
    const double x = (lon - g.lon0) / g.dlon;
    if (snap(y) < 0.0 || snap(y) > g.nlat - 1 || snap(x) < 0.0 || snap(x) > g.nlon - 1) {
        throw OutOfDomainError("grid '" + g.name + "': query (" + csv::format_double(lat) + ", " +
                               csv::format_double(lon) + ") outside cell-center bounds");
    }
    double out;
    if (!view.interpolate(lat, lon, out)) {
        throw MissingDataError("grid '" + g.name + "': all neighbors missing at query point");
    }
    return out;
}

void write_covgrid(const CovariateGrid& g, const std::string& path) {
    g.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << "name=" << g.name << "\n";
    out << "lat0=" << csv::format_double(g.lat0) << "\n";
    out << "lon0=" << csv::format_double(g.lon0) << "\n";
    out << "dlat=" << csv::format_double(g.dlat) << "\n";
    out << "dlon=" << csv::format_double(g.dlon) << "\n";
    out << "nlat=" << g.nlat << "\n";
    out << "nlon=" << g.nlon << "\n";
    out << "times=";
    for (std::size_t i = 0; i < g.times.size(); ++i) {
        if (i) out << ',';
        out << format_rfc3339(g.times[i]);
    }
    out << "\n";
    out << "missing=" << csv::format_double(g.missing) << "\n";
    // Payload assumes a little-endian host, as does the reader.
    out.write(reinterpret_cast<const char*>(g.values.data()),
              static_cast<std::streamsize>(g.values.size() * sizeof(float)));
    if (!out) throw IoError("short write to " + path);
}

namespace {

std::string header_value(std::istream& in, const std::string& key, const std::string& path) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": truncated covgrid header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string prefix = key + "=";
    if (line.rfind(prefix, 0) != 0) {
        throw ParseError(path + ": expected '" + key + "=' header line");
    }
    return line.substr(prefix.size());
}

}  // namespace

CovariateGrid read_covgrid(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    CovariateGrid g;
    g.name = header_value(in, "name", path);
    g.lat0 = csv::parse_double(header_value(in, "lat0", path));
    g.lon0 = csv::parse_double(header_value(in, "lon0", path));
    g.dlat = csv::parse_double(header_value(in, "dlat", path));
    g.dlon = csv::parse_double(header_value(in, "dlon", path));
    g.nlat = static_cast<int>(csv::parse_int(header_value(in, "nlat", path)));
    g.nlon = static_cast<int>(csv::parse_int(header_value(in, "nlon", path)));
    for (const std::string& tok : csv::split_record(header_value(in, "times", path))) {
        g.times.push_back(parse_rfc3339_hour(tok));
    }
    g.missing = static_cast<float>(csv::parse_double(header_value(in, "missing", path)));

    const std::size_t n = g.times.size() * static_cast<std::size_t>(g.nlat) * g.nlon;
    g.values.resize(n);
    in.read(reinterpret_cast<char*>(g.values.data()),
            static_cast<std::streamsize>(n * sizeof(float)));
    if (static_cast<std::size_t>(in.gcount()) != n * sizeof(float)) {
        throw ParseError(path + ": truncated covgrid payload");
    }
    g.validate();
    return g;
}

CovariateGrid read_covgrid_csv(const std::string& path, const std::string& name) {
    const auto rows = csv::read_file(path);
    if (rows.empty() || rows[0] != std::vector<std::string>{"time", "lat", "lon", "value"}) {
        throw ParseError(path + ": expected header time,lat,lon,value");
    }
    std::set<UtcHour> times;
    std::set<double> lats, lons;
    struct Point {
        UtcHour t;
        double lat, lon, value;
    };
    std::vector<Point> pts;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != 4) throw ParseError(path + ": wrong field count on data row");
        Point p{parse_rfc3339_hour(rows[i][0]), csv::parse_double(rows[i][1]),
                csv::parse_double(rows[i][2]), csv::parse_double(rows[i][3])};
        times.insert(p.t);
        lats.insert(p.lat);
        lons.insert(p.lon);
        pts.push_back(p);
    }
    if (pts.empty()) throw ParseError(path + ": no data rows");

    auto uniform_step = [&](const std::set<double>& axis) {
        if (axis.size() < 2) return 1.0;
        std::vector<double> v(axis.begin(), axis.end());
        const double step = v[1] - v[0];
        for (std::size_t i = 2; i < v.size(); ++i) {
            if (std::abs((v[i] - v[i - 1]) - step) > 1e-9) {
                throw ParseError(path + ": non-uniform grid spacing");
            }
        }
        return step;
    };

    CovariateGrid g;
    g.name = name;
    g.lat0 = *lats.begin();
    g.lon0 = *lons.begin();
    g.dlat = uniform_step(lats);
    g.dlon = uniform_step(lons);
    g.nlat = static_cast<int>(lats.size());
    g.nlon = static_cast<int>(lons.size());
    g.times.assign(times.begin(), times.end());
    g.values.assign(g.times.size() * static_cast<std::size_t>(g.nlat) * g.nlon, g.missing);

    std::map<UtcHour, std::size_t> tindex;
    for (std::size_t i = 0; i < g.times.size(); ++i) tindex[g.times[i]] = i;
    for (const Point& p : pts) {
        const int ilat = static_cast<int>(std::lround((p.lat - g.lat0) / g.dlat));
        const int ilon = static_cast<int>(std::lround((p.lon - g.lon0) / g.dlon));
        g.at(tindex[p.t], ilat, ilon) = static_cast<float>(p.value);
    }
    g.validate();
    return g;
}

std::vector<CovariateGrid> load_covariate_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir);
    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const auto ext = entry.path().extension();
        if (ext == ".covgrid" || ext == ".csv") paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());
    std::vector<CovariateGrid> grids;
    for (const auto& p : paths) {
        if (p.extension() == ".covgrid") {
            grids.push_back(read_covgrid(p.string()));
        } else {
            grids.push_back(read_covgrid_csv(p.string(), p.stem().string()));
        }
    }
    return grids;
}

}  // namespace airq
