#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kmsspec/common.hpp"
#include "kmsspec/conformal.hpp"

namespace kms::growth {

// Lattice elements are coordinate vectors; free-group elements are reduced words with letter 2i = a_i,
// 2i+1 = a_i^-1.
using Element = std::vector<int>;

class WordMetricGroup {
public:
    enum Kind { Lattice, Free };

    static WordMetricGroup lattice(int d);  // Z^d, S = {+-e_i}
    // Z^d with the symmetric closure of `gens`; they must generate.
    static WordMetricGroup lattice(int d, const std::vector<Element>& gens);
    static WordMetricGroup free_group(int rank);

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }  // d, or the rank
    const std::vector<Element>& generators() const { return gens_; }
    Element identity() const;
    Element mul(const Element& g, const Element& h) const;
    Element inverse(const Element& g) const;
    int word_length(const Element& g) const;
    std::vector<Element> sphere(int k) const;
    // G_0 .. G_n in a fixed order
    std::vector<std::vector<Element>> spheres(int n_max) const;

private:
    Kind kind_ = Lattice;
    int dim_ = 1;
    bool standard_ = true;
    std::vector<Element> gens_;
};

inline constexpr std::size_t kMaxBallSize = 2'000'000;
inline constexpr int kGrowthHorizon = 64;
inline constexpr double kGrowthThreshold = 1.2;

struct Census {
    std::vector<std::uint64_t> sphere_sizes;  // |G_0| .. |G_n|
    std::vector<double> indicator;            // |G_k|^(1/k), 0 at k = 0
};
Census ball_census(const WordMetricGroup& G, int n_max);

// Throws Domain unless |G_k|^(1/k) <= threshold at the horizon.
void require_subexponential(const WordMetricGroup& G, int horizon = kGrowthHorizon,
                            double threshold = kGrowthThreshold);

// Z^d acting on Z/M by x -> x + <g, steps> (rotation by steps/M), with
// Omega(g, x) = amp (h(g.x) - h(x)) + <c, g>, h(x) = cos(2 pi x / M).
struct CocycleModel {
    WordMetricGroup group = WordMetricGroup::lattice(1);
    int M = 1;
    std::vector<int> steps;
    double amp = 0.0;
    std::vector<double> c;
    std::string name;

    int act(const Element& g, int x) const;
    double H(int x) const;
    double omega(const Element& g, int x) const;
};

// Rotation by the golden mean approximated on a grid of M points.
CocycleModel coboundary_model(double amp = 1.0, int M = 10007);
CocycleModel homomorphism_model(double c = 1.0);
CocycleModel mixed_model(double amp, double c, int M = 10007);
CocycleModel model_from_preset(const std::string& preset, double amp, double c, int M);

// max |Omega(g, h.x) + Omega(h, x) - Omega(gh, x)| over random triples with |g|, |h| <= radius
double cocycle_defect(const CocycleModel& m, std::uint64_t seed, std::size_t trials, int radius = 50);

struct LimsupEstimate {
    int horizon = 0;
    // tail[n] = max over n < |g| <= N of beta Omega(g, x) / |g|, n = 0 .. N-1; nonincreasing
    std::vector<double> tail;
    double estimate = 0.0;  // tail[N/2]
};
LimsupEstimate limsup_ratio(const CocycleModel& m, int x, double beta, int horizon = kGrowthHorizon);

enum class SpectrumShape { Zero, NonNegative, NonPositive, Real };
std::string to_string(SpectrumShape s);
SpectrumShape classify_spectrum(bool has_nonpos_limsup_point, bool has_nonneg_liminf_point);

struct Classification {
    int horizon = 0;
    double decision_tol = 0.0;       // bounded parts of Omega contribute at most this at the horizon
    double best_plus = 0.0;          // min over base points of the beta = +1 estimate
    double best_minus = 0.0;         // same at beta = -1
    int x_plus = 0, x_minus = 0;
    bool nonpos_limsup = false, nonneg_liminf = false;
    SpectrumShape shape = SpectrumShape::Zero;
};
Classification classify_model(const CocycleModel& m, int horizon = kGrowthHorizon);

struct NetAtom {
    Element g;
    int state = 0;
    double weight = 0.0;  // normalized
};

struct MeasureNet {
    int x = 0;
    double beta = 0.0, s = 0.0;
    int R = 0;
    std::vector<NetAtom> atoms;
    double tail_mass = 0.0;  // normalized mass of the outermost sphere
    std::vector<double> state_measure(int M) const;
};

inline constexpr double kNetTailRel = 1e-15;
inline constexpr int kMaxNetRadius = 100000;

// R = 0 picks the smallest radius whose outer sphere carries < 1e-15 of the mass.
MeasureNet build_measure_net(const CocycleModel& m, int x, double beta, double s, int R = 0);

struct DefectRow {
    std::string h, f;
    double measured = 0.0;
    double bound = 0.0;  // ||f|| (e^{|h| s} - 1)
    double slack = 0.0;  // boundary-shell contribution
    bool ok = false;
};
struct NetCertificate {
    double s = 0.0;
    int R = 0;
    double mass_defect = 0.0;  // |sum of weights - 1|
    std::vector<DefectRow> rows;
    bool pass = false;
};
NetCertificate certify_measure_net(const CocycleModel& m, const MeasureNet& net);

struct OmegaMu {
    std::vector<double> on_generators;  // Omega_mu(e_i)
    double invariance_defect = 0.0;
    double max_additivity_defect = 0.0;  // over random pairs
    SpectrumShape shape = SpectrumShape::Zero;  // uniquely ergodic reading
    double eval(const Element& g) const;
};
OmegaMu omega_mu(const CocycleModel& m, const conformal::ProbVector& mu, std::uint64_t seed = 1);

nlohmann::json to_json(const Census& c);
nlohmann::json to_json(const Classification& c);
nlohmann::json to_json(const NetCertificate& c);
nlohmann::json to_json(const OmegaMu& o);

}  // namespace kms::growth
