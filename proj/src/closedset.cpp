#include "kmsspec/closedset.hpp"

#include <algorithm>
#include <cmath>

namespace kms::spectra {

ClosedSetSpec::ClosedSetSpec(std::vector<std::pair<double, double>> intervals, std::vector<double> points) {
    for (auto [lo, hi] : intervals) {
        require(!std::isnan(lo) && !std::isnan(hi) && lo <= hi, ErrorKind::InvalidInput,
                "interval endpoints must satisfy lo <= hi");
        require(lo < kInf && hi > -kInf, ErrorKind::InvalidInput, "interval must meet the real line");
    }
    std::sort(intervals.begin(), intervals.end());
    for (std::size_t i = 1; i < intervals.size(); ++i)
        require(intervals[i].first > intervals[i - 1].second, ErrorKind::InvalidInput,
                "intervals must be disjoint");
    intervals_ = std::move(intervals);
    for (double p : points) require(std::isfinite(p), ErrorKind::InvalidInput, "isolated points must be finite");
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    for (double p : points) {
        bool inside = false;
        for (auto [lo, hi] : intervals_) inside = inside || (p >= lo && p <= hi);
        if (!inside) points_.push_back(p);
    }
}

double ClosedSetSpec::distance(double beta) const {
    double d = kInf;
    for (auto [lo, hi] : intervals_) {
        if (beta >= lo && beta <= hi) return 0.0;
        d = std::min(d, beta < lo ? lo - beta : beta - hi);
    }
    for (double p : points_) d = std::min(d, std::abs(beta - p));
    return d;
}

nlohmann::json to_json(const ClosedSetSpec& k) {
    auto iv = nlohmann::json::array();
    for (auto [lo, hi] : k.intervals()) iv.push_back({dec(lo), dec(hi)});
    auto pts = nlohmann::json::array();
    for (double p : k.points()) pts.push_back(dec(p));
    return {{"intervals", iv}, {"points", pts}};
}

ClosedSetSpec closed_set_from_json(const nlohmann::json& j) {
    std::vector<std::pair<double, double>> iv;
    std::vector<double> pts;
    if (j.contains("intervals"))
        for (const auto& p : j.at("intervals")) {
            require(p.is_array() && p.size() == 2, ErrorKind::InvalidInput, "interval must be a [lo, hi] pair");
            iv.push_back({parse_dec(p.at(0).get<std::string>()), parse_dec(p.at(1).get<std::string>())});
        }
    if (j.contains("points"))
        for (const auto& p : j.at("points")) pts.push_back(parse_dec(p.get<std::string>()));
    return ClosedSetSpec(std::move(iv), std::move(pts));
}

}  // namespace kms::spectra
