#pragma once

#include <utility>
#include <vector>

#include "json.hpp"
#include "kmsspec/common.hpp"

namespace kms::spectra {

// Finite union of closed intervals (endpoints may be +-inf) and isolated points.
class ClosedSetSpec {
public:
    ClosedSetSpec() = default;
    ClosedSetSpec(std::vector<std::pair<double, double>> intervals, std::vector<double> points);

    static ClosedSetSpec whole_line() { return ClosedSetSpec({{-kInf, kInf}}, {}); }

    double distance(double beta) const;
    bool contains(double beta) const { return distance(beta) == 0.0; }
    bool empty() const { return intervals_.empty() && points_.empty(); }

    const std::vector<std::pair<double, double>>& intervals() const { return intervals_; }
    const std::vector<double>& points() const { return points_; }

    static constexpr double kInf = std::numeric_limits<double>::infinity();

private:
    std::vector<std::pair<double, double>> intervals_;  // sorted, disjoint
    std::vector<double> points_;                        // sorted, outside every interval
};

nlohmann::json to_json(const ClosedSetSpec& k);
// {"intervals": [["lo","hi"], ...], "points": ["x", ...]}; "inf"/"-inf" allowed as endpoints.
ClosedSetSpec closed_set_from_json(const nlohmann::json& j);

}  // namespace kms::spectra
