#include "kmsspec/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace kms::conformal {

using nlohmann::json;

FiniteGroupTable FiniteGroupTable::cyclic(int n) {
    require(n >= 1 && n <= kMaxGroupOrder, ErrorKind::InvalidInput, "cyclic order out of range");
    FiniteGroupTable g;
    g.order = n;
    g.mul.resize(static_cast<std::size_t>(n) * n);
    g.inv.resize(n);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) g.mul[static_cast<std::size_t>(a) * n + b] = (a + b) % n;
        g.inv[a] = (n - a) % n;
    }
    g.identity = 0;
    return g;
}

FiniteGroupTable FiniteGroupTable::product(const FiniteGroupTable& a, const FiniteGroupTable& b) {
    const int n = a.order * b.order;
    require(n <= kMaxGroupOrder, ErrorKind::InvalidInput, "product group exceeds order 64");
    FiniteGroupTable g;
    g.order = n;
    g.mul.resize(static_cast<std::size_t>(n) * n);
    g.inv.resize(n);
    // element (x, y) encoded as x * b.order + y
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
            int ax = x / b.order, bx = x % b.order, ay = y / b.order, by = y % b.order;
            g.mul[static_cast<std::size_t>(x) * n + y] = a.op(ax, ay) * b.order + b.op(bx, by);
        }
        g.inv[x] = a.inv[x / b.order] * b.order + b.inv[x % b.order];
    }
    g.identity = a.identity * b.order + b.identity;
    return g;
}

FiniteGroupTable FiniteGroupTable::from_table(int order, std::vector<int> mul) {
    require(order >= 1 && order <= kMaxGroupOrder, ErrorKind::InvalidInput, "group order out of range");
    require(mul.size() == static_cast<std::size_t>(order) * order, ErrorKind::InvalidInput,
            "table size mismatch");
    FiniteGroupTable g;
    g.order = order;
    g.mul = std::move(mul);
    for (int v : g.mul) require(v >= 0 && v < order, ErrorKind::InvalidInput, "table entry out of range");
    g.identity = -1;
    for (int e = 0; e < order && g.identity < 0; ++e) {
        bool ok = true;
        for (int x = 0; x < order && ok; ++x) ok = g.op(e, x) == x && g.op(x, e) == x;
        if (ok) g.identity = e;
    }
    require(g.identity >= 0, ErrorKind::InvalidInput, "no identity element");
    g.inv.assign(order, -1);
    for (int x = 0; x < order; ++x)
        for (int y = 0; y < order; ++y)
            if (g.op(x, y) == g.identity) g.inv[x] = y;
    g.validate();
    return g;
}

void FiniteGroupTable::validate() const {
    require(order >= 1 && order <= kMaxGroupOrder, ErrorKind::InvalidInput, "group order out of range");
    require(mul.size() == static_cast<std::size_t>(order) * order && inv.size() == static_cast<std::size_t>(order),
            ErrorKind::InvalidInput, "table shape");
    for (int x = 0; x < order; ++x) {
        require(op(identity, x) == x && op(x, identity) == x, ErrorKind::InvalidInput, "identity not neutral");
        require(op(x, inv[x]) == identity && op(inv[x], x) == identity, ErrorKind::InvalidInput,
                "inverse table wrong");
        for (int y = 0; y < order; ++y)
            for (int z = 0; z < order; ++z)
                require(op(op(x, y), z) == op(x, op(y, z)), ErrorKind::InvalidInput, "not associative");
    }
}

ProbVector::ProbVector(std::vector<double> w) : w_(std::move(w)) {
    require(!w_.empty(), ErrorKind::InvalidInput, "empty probability vector");
    double s = 0;
    for (double x : w_) {
        require(std::isfinite(x) && x > 0, ErrorKind::InvalidInput, "weights must be finite and > 0");
        s += x;
    }
    require(std::abs(s - 1.0) <= kRenormTol, ErrorKind::InvalidInput,
            "weights sum to " + dec(s) + ", off by more than 1e-9");
    if (std::abs(s - 1.0) > 0) {
        for (double& x : w_) x /= s;
    }
}

ProbVector ProbVector::from_log(const std::vector<double>& logw) {
    require(!logw.empty(), ErrorKind::InvalidInput, "empty probability vector");
    const double z = log_sum_exp(logw);
    std::vector<double> w(logw.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(logw[i] - z);
    ProbVector p;
    p.w_ = std::move(w);
    for (double x : p.w_)
        require(x > 0, ErrorKind::Numeric, "weight underflow; |beta * log weight| too large");
    return p;
}

ProbVector ProbVector::uniform(std::size_t n) {
    return ProbVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

void FiniteConformalBlock::validate() const {
    group.validate();
    require(base_measure.size() == static_cast<std::size_t>(group.order), ErrorKind::InvalidInput,
            "measure size differs from group order");
    require(potential.size() == static_cast<std::size_t>(group.order), ErrorKind::InvalidInput,
            "potential size differs from group order");
    require(base_a > 1, ErrorKind::InvalidInput, "block base must exceed 1");
    for (double h : potential)
        require(h > 0 && h >= 1 / base_a * (1 - 1e-15) && h <= base_a * (1 + 1e-15), ErrorKind::InvalidInput,
                "potential outside [1/a, a]");
}

ProbVector conformal_weights(const FiniteConformalBlock& block, double beta) {
    require(std::isfinite(beta), ErrorKind::InvalidInput, "beta must be finite");
    std::vector<double> lw(block.base_measure.size());
    for (std::size_t i = 0; i < lw.size(); ++i) lw[i] = beta * std::log(block.base_measure[i]);
    return ProbVector::from_log(lw);
}

double integrate_potential(const FiniteConformalBlock& block, double beta) {
    require(std::isfinite(beta), ErrorKind::InvalidInput, "beta must be finite");
    LogSum num, den;
    for (std::size_t i = 0; i < block.potential.size(); ++i) {
        double lm = beta * std::log(block.base_measure[i]);
        den.add(lm);
        num.add(lm + beta * std::log(block.potential[i]));
    }
    return std::exp(num.value() - den.value());
}

std::size_t TruncatedProductSystem::configurations() const {
    std::size_t n = 1;
    for (const auto& b : blocks) {
        n *= static_cast<std::size_t>(b.group.order);
        require(n <= kMaxConfigurations, ErrorKind::SizeCap, "truncation too large to enumerate");
    }
    return n;
}

std::vector<int> TruncatedProductSystem::decode(std::size_t index) const {
    std::vector<int> cfg(blocks.size());
    for (std::size_t k = blocks.size(); k-- > 0;) {
        auto r = static_cast<std::size_t>(blocks[k].group.order);
        cfg[k] = static_cast<int>(index % r);
        index /= r;
    }
    return cfg;
}

std::size_t TruncatedProductSystem::encode(const std::vector<int>& cfg) const {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < blocks.size(); ++k)
        idx = idx * static_cast<std::size_t>(blocks[k].group.order) + static_cast<std::size_t>(cfg[k]);
    return idx;
}

std::vector<int> TruncatedProductSystem::act(const std::vector<int>& g, const std::vector<int>& x) const {
    std::vector<int> y(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) y[k] = blocks[k].group.op(g[k], x[k]);
    return y;
}

double TruncatedProductSystem::omega(const std::vector<int>& g, const std::vector<int>& x) const {
    double s = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const auto& mu = blocks[k].base_measure;
        s += std::log(mu[static_cast<std::size_t>(blocks[k].group.op(g[k], x[k]))]) -
             std::log(mu[static_cast<std::size_t>(x[k])]);
    }
    return s;
}

Generator Generator::in_block(const TruncatedProductSystem& sys, std::size_t block, int elem) {
    if (block >= sys.blocks.size())
        throw Error(ErrorKind::UnsupportedGenerator, "generator moves coordinate " + std::to_string(block) +
                                                         " outside the truncation");
    Generator g;
    g.element.resize(sys.blocks.size());
    for (std::size_t k = 0; k < sys.blocks.size(); ++k) g.element[k] = sys.blocks[k].group.identity;
    require(elem >= 0 && elem < sys.blocks[block].group.order, ErrorKind::InvalidInput, "element out of range");
    g.element[block] = elem;
    return g;
}

ConformalityReport check_conformality(const TruncatedProductSystem& sys, const ProbVector& measure,
                                      double beta, const std::vector<Generator>& gens, double tol) {
    const std::size_t n = sys.configurations();
    require(measure.size() == n, ErrorKind::InvalidInput, "measure does not live on the truncation");
    for (const auto& g : gens) {
        if (g.element.size() != sys.blocks.size())
            throw Error(ErrorKind::UnsupportedGenerator, "generator acts outside the truncation window");
        for (std::size_t k = 0; k < g.element.size(); ++k)
            require(g.element[k] >= 0 && g.element[k] < sys.blocks[k].group.order, ErrorKind::InvalidInput,
                    "generator entry out of range");
    }
    ConformalityReport rep;
    std::vector<int> ginv;
    for (const auto& g : gens) {
        ginv.resize(g.element.size());
        for (std::size_t k = 0; k < ginv.size(); ++k) ginv[k] = sys.blocks[k].group.inv[g.element[k]];
        // f = indicator of y:  int f(g x) e^{beta Omega(g,x)} dm(x) = m(g^-1 y) e^{beta Omega(g, g^-1 y)}
        for (std::size_t yi = 0; yi < n; ++yi) {
            auto y = sys.decode(yi);
            auto x = sys.act(ginv, y);
            double lhs = measure[sys.encode(x)] * std::exp(beta * sys.omega(g.element, x));
            rep.max_defect = std::max(rep.max_defect, std::abs(lhs - measure[yi]));
        }
    }
    rep.pass = rep.max_defect <= tol;
    return rep;
}

ProbVector cohomologous_transform(const ProbVector& m, const std::vector<double>& H, double beta) {
    require(H.size() == m.size(), ErrorKind::InvalidInput, "measure and potential sizes differ");
    std::vector<double> lw(m.size());
    for (std::size_t i = 0; i < lw.size(); ++i) lw[i] = std::log(m[i]) + beta * H[i];
    return ProbVector::from_log(lw);
}

std::vector<ProbVector> product_measure(const std::vector<FiniteConformalBlock>& blocks, double beta) {
    std::vector<ProbVector> out;
    out.reserve(blocks.size());
    for (const auto& b : blocks) {
        b.validate();
        out.push_back(conformal_weights(b, beta));
    }
    return out;
}

ProbVector joint_measure(const std::vector<ProbVector>& factors) {
    std::vector<double> lw{0.0};
    for (const auto& f : factors) {
        std::vector<double> next;
        next.reserve(lw.size() * f.size());
        for (double a : lw)
            for (double b : f.weights()) next.push_back(a + std::log(b));
        lw = std::move(next);
        require(lw.size() <= kMaxConfigurations, ErrorKind::SizeCap, "joint measure too large");
    }
    return ProbVector::from_log(lw);
}

CylinderFunction::CylinderFunction(std::vector<std::size_t> window, std::vector<int> radices,
                                   std::vector<double> table)
    : window_(std::move(window)), radices_(std::move(radices)), table_(std::move(table)) {
    require(window_.size() == radices_.size(), ErrorKind::InvalidInput, "window/radix mismatch");
    std::size_t n = 1;
    for (int r : radices_) n *= static_cast<std::size_t>(r);
    require(table_.size() == n, ErrorKind::InvalidInput, "table size must be the product of radices");
}

double CylinderFunction::operator()(const std::vector<int>& cfg) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < window_.size(); ++i) {
        require(window_[i] < cfg.size(), ErrorKind::InvalidInput, "configuration shorter than window");
        idx = idx * static_cast<std::size_t>(radices_[i]) + static_cast<std::size_t>(cfg[window_[i]]);
    }
    return table_[idx];
}

json to_json(const ProbVector& p) {
    json a = json::array();
    for (double w : p.weights()) a.push_back(dec(w));
    return a;
}

ProbVector prob_from_json(const json& j) {
    std::vector<double> w;
    for (const auto& s : j) w.push_back(parse_dec(s.get<std::string>()));
    return ProbVector(std::move(w));
}

json to_json(const FiniteConformalBlock& b) {
    json j;
    j["order"] = b.group.order;
    j["weights"] = to_json(b.base_measure);
    json pot = json::array();
    for (double h : b.potential) pot.push_back(dec(h));
    j["potential"] = pot;
    j["base"] = dec(b.base_a);
    bool cyclic = true;
    auto c = FiniteGroupTable::cyclic(b.group.order);
    cyclic = c.mul == b.group.mul;
    if (!cyclic) j["table"] = b.group.mul;
    return j;
}

FiniteConformalBlock block_from_json(const json& j) {
    FiniteConformalBlock b;
    const int order = j.at("order").get<int>();
    b.group = j.contains("table") ? FiniteGroupTable::from_table(order, j["table"].get<std::vector<int>>())
                                  : FiniteGroupTable::cyclic(order);
    b.base_measure = prob_from_json(j.at("weights"));
    for (const auto& s : j.at("potential")) b.potential.push_back(parse_dec(s.get<std::string>()));
    b.base_a = parse_dec(j.at("base").get<std::string>());
    b.validate();
    return b;
}

}  // namespace kms::conformal
