#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bellbound/errors.hpp"

namespace bellbound {

inline constexpr double kNormalizationTolerance = 1e-9;
inline constexpr double kNegativeClampTolerance = 1e-12;
inline constexpr std::size_t kDefaultVertexCap = std::size_t{1} << 20;

// Measurement scenario: N parties, per-party setting counts M_i, per-setting
// outcome counts K_{i,m}. Joint settings and joint outcomes are indexed in
// mixed radix with party 0 as the most significant digit; this order is part
// of the file format contract.
class Scenario {
public:
    Scenario(std::vector<int> settings, std::vector<std::vector<int>> outcomes)
        : settings_(std::move(settings)), outcomes_(std::move(outcomes)) {
        if (settings_.empty()) {
            throw InvalidInputError("scenario needs at least one party");
        }
        if (outcomes_.size() != settings_.size()) {
            throw InvalidInputError("outcome table does not match party count");
        }
        for (std::size_t i = 0; i < settings_.size(); ++i) {
            if (settings_[i] < 1) {
                throw InvalidInputError("party " + std::to_string(i) +
                                        " needs at least one setting");
            }
            if (outcomes_[i].size() != static_cast<std::size_t>(settings_[i])) {
                throw InvalidInputError("party " + std::to_string(i) +
                                        " outcome list does not match its setting count");
            }
            for (int k : outcomes_[i]) {
                if (k < 2) {
                    throw InvalidInputError("party " + std::to_string(i) +
                                            " has a setting with fewer than 2 outcomes");
                }
            }
        }
        tau_ = 1;
        for (int m : settings_) tau_ *= static_cast<std::size_t>(m);
        flat_offsets_.resize(tau_ + 1);
        flat_offsets_[0] = 0;
        std::vector<int> tuple(parties());
        for (std::size_t s = 0; s < tau_; ++s) {
            decode_setting(s, tuple);
            std::size_t n = 1;
            for (int i = 0; i < parties(); ++i) {
                n *= static_cast<std::size_t>(outcomes_[i][tuple[i]]);
            }
            flat_offsets_[s + 1] = flat_offsets_[s] + n;
        }
    }

    // All parties share one setting count and one outcome count.
    static Scenario homogeneous(int parties, int settings, int outcomes) {
        return Scenario(std::vector<int>(parties, settings),
                        std::vector<std::vector<int>>(
                            parties, std::vector<int>(settings, outcomes)));
    }

    int parties() const { return static_cast<int>(settings_.size()); }
    int settings(int party) const { return settings_[party]; }
    int outcomes(int party, int setting) const { return outcomes_[party][setting]; }
    const std::vector<int>& setting_counts() const { return settings_; }
    const std::vector<std::vector<int>>& outcome_counts() const { return outcomes_; }

    std::size_t joint_setting_count() const { return tau_; }

    std::size_t setting_index(std::span<const int> tuple) const {
        std::size_t s = 0;
        for (int i = 0; i < parties(); ++i) {
            if (tuple[i] < 0 || tuple[i] >= settings_[i]) {
                throw InvalidInputError("setting index out of range for party " +
                                        std::to_string(i));
            }
            s = s * static_cast<std::size_t>(settings_[i]) +
                static_cast<std::size_t>(tuple[i]);
        }
        return s;
    }

    std::vector<int> setting_tuple(std::size_t index) const {
        std::vector<int> tuple(parties());
        decode_setting(index, tuple);
        return tuple;
    }

    std::size_t outcome_count(std::size_t setting_index) const {
        return flat_offsets_[setting_index + 1] - flat_offsets_[setting_index];
    }

    std::size_t outcome_index(std::span<const int> setting_tuple,
                              std::span<const int> outcome_tuple) const {
        std::size_t o = 0;
        for (int i = 0; i < parties(); ++i) {
            int k = outcomes_[i][setting_tuple[i]];
            if (outcome_tuple[i] < 0 || outcome_tuple[i] >= k) {
                throw InvalidInputError("outcome index out of range for party " +
                                        std::to_string(i));
            }
            o = o * static_cast<std::size_t>(k) + static_cast<std::size_t>(outcome_tuple[i]);
        }
        return o;
    }

    std::vector<int> outcome_tuple(std::span<const int> setting_tuple,
                                   std::size_t index) const {
        std::vector<int> tuple(parties());
        for (int i = parties() - 1; i >= 0; --i) {
            std::size_t k = static_cast<std::size_t>(outcomes_[i][setting_tuple[i]]);
            tuple[i] = static_cast<int>(index % k);
            index /= k;
        }
        return tuple;
    }

    // Flat layout: per-setting probability blocks concatenated in setting
    // order. Shared by behaviors and the polytope solvers.
    std::size_t flat_offset(std::size_t setting_index) const {
        return flat_offsets_[setting_index];
    }
    std::size_t flat_dimension() const { return flat_offsets_[tau_]; }

    // Saturates at cap + 1 so callers can test against a cap without overflow.
    std::size_t vertex_count_capped(std::size_t cap) const {
        unsigned __int128 n = 1;
        for (int i = 0; i < parties(); ++i) {
            for (int m = 0; m < settings_[i]; ++m) {
                n *= static_cast<unsigned>(outcomes_[i][m]);
                if (n > cap) return cap + 1;
            }
        }
        return static_cast<std::size_t>(n);
    }

    bool operator==(const Scenario& other) const {
        return settings_ == other.settings_ && outcomes_ == other.outcomes_;
    }
    bool operator!=(const Scenario& other) const { return !(*this == other); }

private:
    void decode_setting(std::size_t index, std::vector<int>& tuple) const {
        for (int i = parties() - 1; i >= 0; --i) {
            std::size_t m = static_cast<std::size_t>(settings_[i]);
            tuple[i] = static_cast<int>(index % m);
            index /= m;
        }
    }

    std::vector<int> settings_;
    std::vector<std::vector<int>> outcomes_;
    std::size_t tau_ = 0;
    std::vector<std::size_t> flat_offsets_;
};

// Probability table p(a|m) over a scenario. Entries in [-1e-12, 0) are
// clamped to 0 at construction; anything more negative is left for
// validate_behavior to report.
class Behavior {
public:
    Behavior(Scenario scenario, std::vector<double> flat_table)
        : scenario_(std::move(scenario)), table_(std::move(flat_table)) {
        if (table_.size() != scenario_.flat_dimension()) {
            throw InvalidInputError(
                "behavior table has " + std::to_string(table_.size()) +
                " entries, scenario needs " +
                std::to_string(scenario_.flat_dimension()));
        }
        for (double& v : table_) {
            if (v < 0.0 && v >= -kNegativeClampTolerance) v = 0.0;
        }
    }

    static Behavior uniform(const Scenario& s) {
        std::vector<double> t(s.flat_dimension());
        for (std::size_t m = 0; m < s.joint_setting_count(); ++m) {
            double p = 1.0 / static_cast<double>(s.outcome_count(m));
            std::fill(t.begin() + s.flat_offset(m),
                      t.begin() + s.flat_offset(m) + s.outcome_count(m), p);
        }
        return Behavior(s, std::move(t));
    }

    const Scenario& scenario() const { return scenario_; }
    const std::vector<double>& flat() const { return table_; }
    std::vector<double>& flat_mutable() { return table_; }

    double value(std::size_t setting_index, std::size_t outcome_index) const {
        return table_[scenario_.flat_offset(setting_index) + outcome_index];
    }

    std::span<const double> setting_block(std::size_t setting_index) const {
        return std::span<const double>(table_).subspan(
            scenario_.flat_offset(setting_index),
            scenario_.outcome_count(setting_index));
    }

private:
    Scenario scenario_;
    std::vector<double> table_;
};

struct Violation {
    enum class Kind { normalization, negativity };
    Kind kind;
    std::size_t setting_index;
    double residual;
    std::string message;
};

inline std::vector<Violation> validate_behavior(const Behavior& b) {
    std::vector<Violation> out;
    const Scenario& s = b.scenario();
    for (std::size_t m = 0; m < s.joint_setting_count(); ++m) {
        double sum = 0.0;
        double worst_negative = 0.0;
        for (double v : b.setting_block(m)) {
            sum += v;
            worst_negative = std::min(worst_negative, v);
        }
        if (worst_negative < -kNegativeClampTolerance) {
            std::ostringstream msg;
            msg << "negative probability " << worst_negative
                << " at joint setting " << m;
            out.push_back({Violation::Kind::negativity, m, worst_negative, msg.str()});
        }
        if (std::abs(sum - 1.0) > kNormalizationTolerance) {
            std::ostringstream msg;
            msg << "joint setting " << m << " sums to " << sum;
            out.push_back({Violation::Kind::normalization, m, sum - 1.0, msg.str()});
        }
    }
    return out;
}

inline void require_valid(const Behavior& b) {
    auto violations = validate_behavior(b);
    if (!violations.empty()) {
        std::string msg = "behavior fails validation:";
        for (const auto& v : violations) msg += "\n  " + v.message;
        throw InvalidInputError(msg);
    }
}

struct NoSignalingReport {
    bool ok = true;
    double worst_residual = 0.0;
    std::string detail;
};

// A behavior is no-signaling when each party's outcome marginal depends only
// on that party's own setting.
inline NoSignalingReport is_no_signaling(const Behavior& b, double tol = 1e-9) {
    const Scenario& s = b.scenario();
    NoSignalingReport report;
    std::vector<int> tuple(s.parties());
    for (int party = 0; party < s.parties(); ++party) {
        for (int own = 0; own < s.settings(party); ++own) {
            std::vector<double> reference;
            std::size_t reference_setting = 0;
            for (std::size_t m = 0; m < s.joint_setting_count(); ++m) {
                auto st = s.setting_tuple(m);
                if (st[party] != own) continue;
                std::vector<double> marginal(s.outcomes(party, own), 0.0);
                auto block = b.setting_block(m);
                for (std::size_t o = 0; o < block.size(); ++o) {
                    marginal[s.outcome_tuple(st, o)[party]] += block[o];
                }
                if (reference.empty()) {
                    reference = std::move(marginal);
                    reference_setting = m;
                    continue;
                }
                for (std::size_t a = 0; a < marginal.size(); ++a) {
                    double r = std::abs(marginal[a] - reference[a]);
                    if (r > report.worst_residual) {
                        report.worst_residual = r;
                        std::ostringstream msg;
                        msg << "party " << party << " setting " << own
                            << " marginal differs between joint settings "
                            << reference_setting << " and " << m << " by " << r;
                        report.detail = msg.str();
                    }
                }
            }
        }
    }
    report.ok = report.worst_residual <= tol;
    return report;
}

// One outcome fixed per (party, setting) pair.
struct DeterministicStrategy {
    Scenario scenario;
    std::vector<std::vector<int>> choice;  // [party][setting] -> outcome
};

inline Behavior vertex_behavior(const DeterministicStrategy& v) {
    const Scenario& s = v.scenario;
    if (v.choice.size() != static_cast<std::size_t>(s.parties())) {
        throw InvalidInputError("strategy does not cover every party");
    }
    for (int i = 0; i < s.parties(); ++i) {
        if (v.choice[i].size() != static_cast<std::size_t>(s.settings(i))) {
            throw InvalidInputError("strategy does not cover every setting of party " +
                                    std::to_string(i));
        }
        for (int m = 0; m < s.settings(i); ++m) {
            if (v.choice[i][m] < 0 || v.choice[i][m] >= s.outcomes(i, m)) {
                throw InvalidInputError("strategy outcome out of range");
            }
        }
    }
    std::vector<double> t(s.flat_dimension(), 0.0);
    std::vector<int> a(s.parties());
    for (std::size_t m = 0; m < s.joint_setting_count(); ++m) {
        auto st = s.setting_tuple(m);
        for (int i = 0; i < s.parties(); ++i) a[i] = v.choice[i][st[i]];
        t[s.flat_offset(m) + s.outcome_index(st, a)] = 1.0;
    }
    return Behavior(s, std::move(t));
}

// Deterministic strategies of a scenario in a fixed canonical order: a
// strategy is the digit tuple (o(0,0), o(0,1), ..., o(N-1,M-1)) listed
// lexicographically, so the last (party, setting) pair varies fastest.
class VertexSet {
public:
    explicit VertexSet(Scenario scenario, std::size_t cap = kDefaultVertexCap)
        : scenario_(std::move(scenario)) {
        std::size_t n = scenario_.vertex_count_capped(cap);
        if (n > cap) {
            throw CapacityError("deterministic strategy count exceeds cap " +
                                std::to_string(cap));
        }
        size_ = n;
        for (int i = 0; i < scenario_.parties(); ++i) {
            for (int m = 0; m < scenario_.settings(i); ++m) {
                radices_.push_back(scenario_.outcomes(i, m));
                pair_party_.push_back(i);
                pair_setting_.push_back(m);
            }
        }
    }

    const Scenario& scenario() const { return scenario_; }
    std::size_t size() const { return size_; }

    DeterministicStrategy strategy(std::size_t v) const {
        DeterministicStrategy out{scenario_, {}};
        out.choice.resize(scenario_.parties());
        for (int i = 0; i < scenario_.parties(); ++i) {
            out.choice[i].resize(scenario_.settings(i));
        }
        for (std::size_t j = radices_.size(); j-- > 0;) {
            out.choice[pair_party_[j]][pair_setting_[j]] =
                static_cast<int>(v % static_cast<std::size_t>(radices_[j]));
            v /= static_cast<std::size_t>(radices_[j]);
        }
        return out;
    }

    Behavior behavior(std::size_t v) const { return vertex_behavior(strategy(v)); }

    // Flat index of the single unit entry of vertex v at each joint setting.
    std::vector<std::size_t> support(std::size_t v) const {
        DeterministicStrategy st = strategy(v);
        const Scenario& s = scenario_;
        std::vector<std::size_t> out(s.joint_setting_count());
        std::vector<int> a(s.parties());
        for (std::size_t m = 0; m < s.joint_setting_count(); ++m) {
            auto mt = s.setting_tuple(m);
            for (int i = 0; i < s.parties(); ++i) a[i] = st.choice[i][mt[i]];
            out[m] = s.flat_offset(m) + s.outcome_index(mt, a);
        }
        return out;
    }

    // Dense size() x tau table of the flat indices above, for solvers that
    // scan all vertices repeatedly.
    std::vector<std::uint32_t> support_matrix() const {
        std::size_t tau = scenario_.joint_setting_count();
        if (size_ > (std::size_t{1} << 26) / std::max<std::size_t>(tau, 1)) {
            throw CapacityError("vertex support table too large to materialize");
        }
        std::vector<std::uint32_t> out(size_ * tau);
        for (std::size_t v = 0; v < size_; ++v) {
            auto sup = support(v);
            for (std::size_t m = 0; m < tau; ++m) {
                out[v * tau + m] = static_cast<std::uint32_t>(sup[m]);
            }
        }
        return out;
    }

private:
    Scenario scenario_;
    std::size_t size_ = 0;
    std::vector<int> radices_;
    std::vector<int> pair_party_;
    std::vector<int> pair_setting_;
};

inline VertexSet enumerate_vertices(const Scenario& s,
                                    std::size_t cap = kDefaultVertexCap) {
    return VertexSet(s, cap);
}

// Convex combination of vertices; weights need not be normalized exactly but
// must be nonnegative.
inline Behavior mix_vertices(
    const VertexSet& vertices,
    std::span<const std::pair<std::size_t, double>> weights) {
    const Scenario& s = vertices.scenario();
    std::vector<double> t(s.flat_dimension(), 0.0);
    for (const auto& [v, w] : weights) {
        if (v >= vertices.size()) {
            throw InvalidInputError("vertex index out of range");
        }
        if (w < 0.0) {
            throw InvalidInputError("mixture weight must be nonnegative");
        }
        for (std::size_t idx : vertices.support(v)) t[idx] += w;
    }
    return Behavior(s, std::move(t));
}

namespace detail {

// Uniform double in [0, 1) with 53 random bits; implementation-stable across
// standard libraries, unlike std::uniform_real_distribution.
inline double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::size_t uniform_below(std::mt19937_64& rng, std::size_t n) {
    std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % n;
    for (;;) {
        std::uint64_t x = rng();
        if (x < limit) return static_cast<std::size_t>(x % n);
    }
}

}  // namespace detail

struct LocalSample {
    Behavior behavior;
    std::vector<std::pair<std::size_t, double>> weights;  // locality certificate
};

// Reproducible convex mixture of uniformly drawn distinct vertices with
// flat-Dirichlet weights.
inline LocalSample random_local_behavior(const Scenario& s, std::uint64_t seed,
                                         std::size_t support_size,
                                         std::size_t cap = kDefaultVertexCap) {
    VertexSet vertices(s, cap);
    if (support_size < 1 || support_size > vertices.size()) {
        throw InvalidInputError("support size must be in [1, vertex count]");
    }
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> picked;
    picked.reserve(support_size);
    while (picked.size() < support_size) {
        std::size_t v = detail::uniform_below(rng, vertices.size());
        if (std::find(picked.begin(), picked.end(), v) == picked.end()) {
            picked.push_back(v);
        }
    }
    std::sort(picked.begin(), picked.end());
    std::vector<std::pair<std::size_t, double>> weights;
    weights.reserve(support_size);
    double total = 0.0;
    for (std::size_t v : picked) {
        double w = -std::log1p(-detail::uniform_unit(rng));
        weights.emplace_back(v, w);
        total += w;
    }
    for (auto& [v, w] : weights) w /= total;
    Behavior b = mix_vertices(vertices, weights);
    return LocalSample{std::move(b), std::move(weights)};
}

}  // namespace bellbound
