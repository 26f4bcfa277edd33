#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "airq/time.hpp"

namespace airq {

// Regular lat/lon grid of one covariate with an ordered list of time slices.
// Hourly slices for meteorology, monthly for remote sensing and emissions;
// interpolation treats time as a step function (nearest slice at or before t).
struct CovariateGrid {
    std::string name;
    double lat0 = 0.0;  // first cell-center latitude
    double lon0 = 0.0;  // first cell-center longitude
    double dlat = 1.0;  // > 0
    double dlon = 1.0;  // > 0
    int nlat = 0;
    int nlon = 0;
    std::vector<UtcHour> times;  // strictly increasing
    float missing = -9999.0f;
    std::vector<float> values;  // [time][lat][lon], size = times * nlat * nlon

    float at(std::size_t time_idx, int ilat, int ilon) const {
        return values[(time_idx * nlat + ilat) * nlon + ilon];
    }
    float& at(std::size_t time_idx, int ilat, int ilon) {
        return values[(time_idx * nlat + ilat) * nlon + ilon];
    }

    double max_lat() const { return lat0 + dlat * (nlat - 1); }
    double max_lon() const { return lon0 + dlon * (nlon - 1); }

    // Index of the last slice at or before t. Throws OutOfDomainError when t
    // precedes the first slice.
    std::size_t time_slice_at(UtcHour t) const;

    void validate() const;  // throws ValidationError on a malformed grid
};

// View over one time slice, used on hot paths so the slice lookup happens
// once per tile rather than once per cell.
struct GridSliceView {
    const CovariateGrid* grid = nullptr;
    const float* slice = nullptr;

    // Bilinear interpolation over the four surrounding cell centers.
    // Missing neighbors drop out with weight renormalization. Returns false
    // when the query is outside the cell-center bounding box or every
    // neighbor is missing.
    bool interpolate(double lat, double lon, double& out) const;
};

GridSliceView slice_view(const CovariateGrid& g, UtcHour t);

// Bilinear in space, step function in time. Throws OutOfDomainError /
// MissingDataError per the view semantics above.
double interpolate_grid(const CovariateGrid& g, double lat, double lon, UtcHour t);

// covgrid v1: nine text header lines (name=, lat0=, lon0=, dlat=, dlon=,
// nlat=, nlon=, times=, missing=) followed by a little-endian float32
// payload, time-major then lat-major then lon.
void write_covgrid(const CovariateGrid& g, const std::string& path);
CovariateGrid read_covgrid(const std::string& path);

// CSV alternative for small fixtures: header time,lat,lon,value. Geometry is
// inferred from the distinct sorted coordinates, which must be uniformly
// spaced; absent combinations become missing cells.
CovariateGrid read_covgrid_csv(const std::string& path, const std::string& name);

// Loads every *.covgrid and *.csv in a directory, keyed by grid name.
std::vector<CovariateGrid> load_covariate_dir(const std::string& dir);

}  // namespace airq
