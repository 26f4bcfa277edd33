#include "airq/metrics.hpp"

#include <cmath>
#include <fstream>

#include "airq/csv.hpp"
#include "airq/errors.hpp"
#include "airq/stats.hpp"

namespace airq {

namespace {

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

bool is_constant(const std::vector<double>& v) {
    for (double x : v) {
        if (x != v.front()) return false;
    }
    return true;
}

}  // namespace

double r2_score(const std::vector<double>& obs, const std::vector<double>& pred) {
    if (obs.size() != pred.size()) throw ValidationError("r2: length mismatch");
    if (obs.size() < 2) throw ValidationError("r2: need at least 2 points");
    if (is_constant(obs)) throw ValidationError("r2: constant observations, undefined denominator");
    const double m = mean_of(obs);
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        ss_res += (obs[i] - pred[i]) * (obs[i] - pred[i]);
        ss_tot += (obs[i] - m) * (obs[i] - m);
    }
    return 1.0 - ss_res / ss_tot;
}

double bias(const std::vector<double>& obs, const std::vector<double>& pred) {
    if (obs.size() != pred.size()) throw ValidationError("bias: length mismatch");
    if (obs.empty()) throw ValidationError("bias: empty input");
    double s = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) s += pred[i] - obs[i];
    return s / static_cast<double>(obs.size());
}

std::optional<double> pearson(const std::vector<double>& obs, const std::vector<double>& pred) {
    if (obs.size() != pred.size()) throw ValidationError("pearson: length mismatch");
    if (obs.size() < 2) throw ValidationError("pearson: need at least 2 points");
    if (is_constant(obs) || is_constant(pred)) return std::nullopt;
    const double mx = mean_of(obs);
    const double my = mean_of(pred);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const double dx = obs[i] - mx;
        const double dy = pred[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    return sxy / std::sqrt(sxx * syy);
}

Iqr90 iqr90(const std::vector<double>& values) {
    if (values.empty()) throw ValidationError("iqr90: empty input");
    Iqr90 out;
    out.p05 = percentile_linear(values, 0.05);
    out.p95 = percentile_linear(values, 0.95);
    out.width = out.p95 - out.p05;
    return out;
}

ContinentTableRow positive_r2_table(Pollutant pollutant,
                                    const std::vector<StationScore>& scores) {
    ContinentTableRow row;
    row.pollutant = pollutant;
    for (Continent c : {Continent::Asia, Continent::Australia, Continent::SouthAmerica,
                        Continent::Africa, Continent::Europe, Continent::NorthAmerica,
                        Continent::Oceania}) {
        row.positive_r2[c] = 0;
    }
    for (const StationScore& s : scores) {
        if (s.pollutant != pollutant) continue;
        row.total_stations += 1;
        if (s.r2 > 0.0) row.positive_r2[s.continent] += 1;
    }
    return row;
}

void write_scores_csv(const std::vector<StationScore>& scores, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "station_id,pollutant,experiment,n,r2,bias,pearson\n";
    for (const StationScore& s : scores) {
        out << csv::join_record({s.station_id, to_string(s.pollutant), s.experiment,
                                 std::to_string(s.n), csv::format_double(s.r2),
                                 csv::format_double(s.bias),
                                 s.pearson ? csv::format_double(*s.pearson) : "undefined"})
            << "\n";
    }
}

std::vector<StationScore> read_scores_csv(const std::string& path) {
    const auto rows = csv::read_file(path);
    if (rows.empty() || rows[0].size() != 7 || rows[0][0] != "station_id") {
        throw ParseError(path + ": unexpected scores header");
    }
    std::vector<StationScore> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != 7) throw ParseError(path + ": wrong field count");
        StationScore s;
        s.station_id = rows[i][0];
        s.pollutant = pollutant_from_string(rows[i][1]);
        s.experiment = rows[i][2];
        s.n = static_cast<std::size_t>(csv::parse_int(rows[i][3]));
        s.r2 = csv::parse_double(rows[i][4]);
        s.bias = csv::parse_double(rows[i][5]);
        if (rows[i][6] != "undefined") s.pearson = csv::parse_double(rows[i][6]);
        out.push_back(std::move(s));
    }
    return out;
}

void write_continent_table(const std::vector<ContinentTableRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "pollutant,total_stations,Asia,Australia,SouthAmerica,Africa,Europe,NorthAmerica,"
           "Oceania\n";
    for (const auto& r : rows) {
        out << to_string(r.pollutant) << ',' << r.total_stations;
        for (Continent c : {Continent::Asia, Continent::Australia, Continent::SouthAmerica,
                            Continent::Africa, Continent::Europe, Continent::NorthAmerica,
                            Continent::Oceania}) {
            out << ',' << r.positive_r2.at(c);
        }
        out << "\n";
    }
}

}  // namespace airq
