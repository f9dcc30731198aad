#include "rankwitness/rankwitness.h"

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>
#include <variant>
#include <vector>

#include "causal_graph.hpp"
#include "distribution.hpp"
#include "error.hpp"
#include "io.hpp"
#include "nonneg_rank.hpp"
#include "protocol.hpp"
#include "psd_rank.hpp"
#include "witness.hpp"

namespace rw = rankwitness;
using rw::io::json;

struct rw_graph {
    rw::graph::CausalGraph graph;
    rw::io::HypothesisFields hypothesis;
};

struct rw_dist {
    rw::io::AnyDistribution dist;
    std::vector<std::string> names;

    explicit rw_dist(rw::io::AnyDistribution d) : dist(std::move(d)) {
        std::visit(
            [&](const auto& x) {
                for (const auto& a : x.axes()) names.push_back(a.name);
            },
            dist);
    }
};

struct rw_config {
    rw::nnrank::RankConfig rank;
    rw_arith arith = RW_ARITH_AUTO;
    double psd_tol = 1e-8;
    std::chrono::milliseconds psd_budget{60'000};
};

namespace {

thread_local std::string last_error;

rw_status map_code(rw::ErrorCode code) {
    using rw::ErrorCode;
    switch (code) {
        case ErrorCode::InvalidArgument: return RW_INVALID_ARGUMENT;
        case ErrorCode::CycleDetected: return RW_CYCLE_DETECTED;
        case ErrorCode::UnknownVariable: return RW_UNKNOWN_VARIABLE;
        case ErrorCode::DuplicateName: return RW_DUPLICATE_NAME;
        case ErrorCode::InvalidPath: return RW_INVALID_PATH;
        case ErrorCode::NegativeEntry: return RW_NEGATIVE_ENTRY;
        case ErrorCode::NotNormalized: return RW_NOT_NORMALIZED;
        case ErrorCode::ShapeMismatch: return RW_SHAPE_MISMATCH;
        case ErrorCode::ZeroConditioningEvent: return RW_ZERO_CONDITIONING_EVENT;
        case ErrorCode::NonBinaryAxis: return RW_NON_BINARY_AXIS;
        case ErrorCode::InfeasibleMoments: return RW_INFEASIBLE_MOMENTS;
        case ErrorCode::TooLarge: return RW_TOO_LARGE;
        case ErrorCode::ZeroMassComponent: return RW_ZERO_MASS_COMPONENT;
        case ErrorCode::OutOfRange: return RW_OUT_OF_RANGE;
        case ErrorCode::NoObservedData: return RW_NO_OBSERVED_DATA;
        case ErrorCode::ParseError: return RW_PARSE_ERROR;
        case ErrorCode::IoError: return RW_IO_ERROR;
    }
    return RW_INTERNAL_ERROR;
}

rw_status fail(rw_status status, std::string message) {
    last_error = std::move(message);
    return status;
}

template <class F>
rw_status guarded(F&& body) {
    try {
        body();
        return RW_OK;
    } catch (const rw::Error& e) {
        return fail(map_code(e.code()), e.what());
    } catch (const json::parse_error& e) {
        return fail(RW_PARSE_ERROR, std::string("ParseError: ") + e.what());
    } catch (const json::exception& e) {
        // Type and key errors raised while reading a well-formed document.
        return fail(RW_PARSE_ERROR, std::string("ParseError: unexpected document shape: ") + e.what());
    } catch (const std::bad_alloc&) {
        return fail(RW_INTERNAL_ERROR, "out of memory");
    } catch (const std::exception& e) {
        return fail(RW_INTERNAL_ERROR, e.what());
    }
}

void require(const void* p, const char* what) {
    if (p == nullptr) throw rw::Error(rw::ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
}

char* dup(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void emit(char** out, const json& j) {
    if (out != nullptr) *out = dup(j.dump());
}

std::vector<std::string> names_of(const char* const* names, std::size_t n) {
    if (n > 0) require(names, "name array");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) {
        require(names[i], "name");
        out.emplace_back(names[i]);
    }
    return out;
}

const rw_config& config_or_default(const rw_config* cfg) {
    static const rw_config defaults{};
    return cfg != nullptr ? *cfg : defaults;
}

bool use_exact(const rw_config& cfg, bool rational_input) {
    switch (cfg.arith) {
        case RW_ARITH_EXACT: return true;
        case RW_ARITH_FLOAT: return false;
        default: return rational_input;
    }
}

rw::nnrank::RankConfig rank_config(const rw_config& cfg, bool rational_input) {
    auto rc = cfg.rank;
    rc.arithmetic = use_exact(cfg, rational_input) ? rw::nnrank::Arithmetic::exact : rw::nnrank::Arithmetic::floating;
    return rc;
}

bool is_rational(const rw::io::AnyDistribution& d) {
    return std::holds_alternative<rw::dist::RationalDistribution>(d);
}

rw::nnrank::RankBounds rank_of(const rw::io::AnyDistribution& d, const rw_config& cfg,
                               std::span<const rw::nnrank::NNFactorization> supplied) {
    const auto rc = rank_config(cfg, is_rational(d));
    if (const auto* q = std::get_if<rw::dist::RationalDistribution>(&d)) {
        if (q->num_axes() != 2) throw rw::Error(rw::ErrorCode::ShapeMismatch, "expected a two-axis distribution");
        return rw::nnrank::nonnegative_rank(q->matrix(), rc, supplied);
    }
    const auto m = rw::io::to_matrix(d);
    if (rc.arithmetic == rw::nnrank::Arithmetic::exact)
        return rw::nnrank::nonnegative_rank(rw::nnrank::to_rational(m), rc, supplied);
    return rw::nnrank::nonnegative_rank(m, rc, supplied);
}

// Float data under exact arithmetic is read as the exact binary values.
rw::io::AnyDistribution as_requested(const rw::io::AnyDistribution& d, const rw_config& cfg) {
    const bool exact = use_exact(cfg, is_rational(d));
    if (exact == is_rational(d)) return d;
    if (!exact) return rw::dist::to_float(std::get<rw::dist::RationalDistribution>(d));
    const auto& f = std::get<rw::dist::FloatDistribution>(d);
    std::vector<rw::Rational> values;
    for (double v : f.values()) values.emplace_back(v);
    rw::Rational sum(0);
    for (const auto& v : values) sum += v;
    for (auto& v : values) v /= sum;
    return rw::dist::RationalDistribution::from_values(f.axes(), std::move(values));
}

void fill(rw_rank_result* out, std::size_t lower, std::size_t upper) {
    if (out == nullptr) return;
    out->lower = lower;
    out->upper = upper;
    out->exact = lower == upper ? 1 : 0;
}

rw_verdict to_c(rw::witness::Status s) {
    switch (s) {
        case rw::witness::Status::Consistent: return RW_CONSISTENT;
        case rw::witness::Status::Refuted: return RW_REFUTED;
        case rw::witness::Status::Inconclusive: return RW_INCONCLUSIVE;
    }
    return RW_INCONCLUSIVE;
}

template <rw::Scalar T>
json moments_json(const rw::dist::ExpectationTable<T>& t) {
    json moments = json::array();
    for (const auto& v : t.moments) {
        if constexpr (std::same_as<T, double>) {
            moments.push_back(v);
        } else {
            moments.push_back(rw::to_string(v));
        }
    }
    return {{"names", t.names}, {"moments", moments}};
}

}  // namespace

extern "C" {

const char* rw_version(void) { return "0.1.0"; }

const char* rw_status_name(rw_status status) {
    switch (status) {
        case RW_OK: return "Ok";
        case RW_INVALID_ARGUMENT: return "InvalidArgument";
        case RW_CYCLE_DETECTED: return "CycleDetected";
        case RW_UNKNOWN_VARIABLE: return "UnknownVariable";
        case RW_DUPLICATE_NAME: return "DuplicateName";
        case RW_INVALID_PATH: return "InvalidPath";
        case RW_NEGATIVE_ENTRY: return "NegativeEntry";
        case RW_NOT_NORMALIZED: return "NotNormalized";
        case RW_SHAPE_MISMATCH: return "ShapeMismatch";
        case RW_ZERO_CONDITIONING_EVENT: return "ZeroConditioningEvent";
        case RW_NON_BINARY_AXIS: return "NonBinaryAxis";
        case RW_INFEASIBLE_MOMENTS: return "InfeasibleMoments";
        case RW_TOO_LARGE: return "TooLarge";
        case RW_ZERO_MASS_COMPONENT: return "ZeroMassComponent";
        case RW_OUT_OF_RANGE: return "OutOfRange";
        case RW_NO_OBSERVED_DATA: return "NoObservedData";
        case RW_PARSE_ERROR: return "ParseError";
        case RW_IO_ERROR: return "IoError";
        case RW_INTERNAL_ERROR: return "InternalError";
    }
    return "Unknown";
}

const char* rw_verdict_name(rw_verdict verdict) {
    switch (verdict) {
        case RW_CONSISTENT: return "Consistent";
        case RW_REFUTED: return "Refuted";
        case RW_INCONCLUSIVE: return "Inconclusive";
    }
    return "Unknown";
}

const char* rw_last_error(void) { return last_error.c_str(); }

void rw_string_free(char* s) { std::free(s); }

rw_config* rw_config_new(void) { return new (std::nothrow) rw_config(); }

void rw_config_free(rw_config* cfg) { delete cfg; }

rw_status rw_config_set_restarts(rw_config* cfg, int restarts) {
    return guarded([&] {
        require(cfg, "config");
        if (restarts < 0 || restarts > 100000)
            throw rw::Error(rw::ErrorCode::OutOfRange, "restarts must lie in [0, 100000]");
        cfg->rank.restarts = restarts;
    });
}

rw_status rw_config_set_max_iters(rw_config* cfg, int max_iters) {
    return guarded([&] {
        require(cfg, "config");
        if (max_iters < 1) throw rw::Error(rw::ErrorCode::OutOfRange, "max_iters must be positive");
        cfg->rank.max_iters = max_iters;
    });
}

rw_status rw_config_set_tol(rw_config* cfg, double tol) {
    return guarded([&] {
        require(cfg, "config");
        if (!(tol > 0.0) || tol >= 1.0) throw rw::Error(rw::ErrorCode::OutOfRange, "tol must lie in (0, 1)");
        cfg->rank.residual_tol = tol;
    });
}

rw_status rw_config_set_seed(rw_config* cfg, uint64_t seed) {
    return guarded([&] {
        require(cfg, "config");
        cfg->rank.seed = seed;
    });
}

rw_status rw_config_set_exact_lb_max_support(rw_config* cfg, size_t cells) {
    return guarded([&] {
        require(cfg, "config");
        if (cells > 32) throw rw::Error(rw::ErrorCode::OutOfRange, "exact lower-bound support is capped at 32 cells");
        cfg->rank.exact_lb_max_support = cells;
    });
}

rw_status rw_config_set_arith(rw_config* cfg, rw_arith arith) {
    return guarded([&] {
        require(cfg, "config");
        if (arith != RW_ARITH_AUTO && arith != RW_ARITH_FLOAT && arith != RW_ARITH_EXACT)
            throw rw::Error(rw::ErrorCode::InvalidArgument, "unknown arithmetic mode");
        cfg->arith = arith;
    });
}

rw_status rw_config_set_psd_tol(rw_config* cfg, double tol) {
    return guarded([&] {
        require(cfg, "config");
        if (!(tol > 0.0) || tol >= 1.0) throw rw::Error(rw::ErrorCode::OutOfRange, "tol must lie in (0, 1)");
        cfg->psd_tol = tol;
    });
}

rw_status rw_config_set_psd_time_budget_ms(rw_config* cfg, int64_t ms) {
    return guarded([&] {
        require(cfg, "config");
        if (ms < 0) throw rw::Error(rw::ErrorCode::OutOfRange, "time budget must be nonnegative");
        cfg->psd_budget = std::chrono::milliseconds(ms);
    });
}

rw_status rw_graph_from_json(const char* text, rw_graph** out) {
    return guarded([&] {
        require(text, "json");
        require(out, "out");
        const auto doc = rw::io::parse(text);
        *out = new rw_graph{rw::io::graph_from_json(doc), rw::io::hypothesis_fields(doc)};
    });
}

void rw_graph_free(rw_graph* g) { delete g; }

rw_status rw_graph_to_json(const rw_graph* g, char** out_json) {
    return guarded([&] {
        require(g, "graph");
        require(out_json, "out_json");
        emit(out_json, rw::io::graph_to_json(g->graph));
    });
}

rw_status rw_graph_to_dot(const rw_graph* g, char** out_dot) {
    return guarded([&] {
        require(g, "graph");
        require(out_dot, "out_dot");
        *out_dot = dup(rw::graph::to_dot(g->graph));
    });
}

rw_status rw_graph_d_separated(const rw_graph* g, const char* const* x, size_t nx, const char* const* y, size_t ny,
                               const char* const* z, size_t nz, int* out) {
    return guarded([&] {
        require(g, "graph");
        require(out, "out");
        const rw::graph::SeparationQuery q{names_of(x, nx), names_of(y, ny), names_of(z, nz)};
        *out = rw::graph::d_separated(g->graph, q) ? 1 : 0;
    });
}

rw_status rw_graph_path_blocked(const rw_graph* g, const char* const* path, size_t npath, const char* const* z,
                                size_t nz, int* out) {
    return guarded([&] {
        require(g, "graph");
        require(out, "out");
        const auto p = names_of(path, npath);
        const auto zs = names_of(z, nz);
        *out = rw::graph::path_is_blocked(g->graph, std::span<const std::string>(p),
                                          std::span<const std::string>(zs))
                   ? 1
                   : 0;
    });
}

rw_status rw_graph_hidden_separators(const rw_graph* g, const char* x, const char* y, const char* const* conditioned,
                                     size_t nconditioned, char** out_json) {
    return guarded([&] {
        require(g, "graph");
        require(x, "x");
        require(y, "y");
        require(out_json, "out_json");
        const auto cond = names_of(conditioned, nconditioned);
        const auto seps = rw::graph::find_hidden_separators(g->graph, x, y, cond);
        json list = json::array();
        std::uint64_t max_card = 0;
        for (const auto& s : seps) {
            list.push_back({{"members", s.members}, {"cardinality", s.cardinality}});
            max_card = std::max(max_card, s.cardinality);
        }
        json doc{{"separators", list}};
        doc["max_cardinality"] = seps.empty() ? json(nullptr) : json(max_card);
        emit(out_json, doc);
    });
}

rw_status rw_dist_from_json(const char* text, rw_dist** out) {
    return guarded([&] {
        require(text, "json");
        require(out, "out");
        *out = new rw_dist(rw::io::distribution_from_json(rw::io::parse(text)));
    });
}

rw_status rw_dist_from_csv(const char* csv, rw_dist** out) {
    return guarded([&] {
        require(csv, "csv");
        require(out, "out");
        *out = new rw_dist(rw::io::distribution_from_csv(csv));
    });
}

void rw_dist_free(rw_dist* d) { delete d; }

int rw_dist_is_exact(const rw_dist* d) { return d != nullptr && is_rational(d->dist) ? 1 : 0; }

size_t rw_dist_num_axes(const rw_dist* d) { return d != nullptr ? d->names.size() : 0; }

const char* rw_dist_axis_name(const rw_dist* d, size_t i) {
    if (d == nullptr || i >= d->names.size()) return nullptr;
    return d->names[i].c_str();
}

rw_status rw_dist_to_json(const rw_dist* d, char** out_json) {
    return guarded([&] {
        require(d, "distribution");
        require(out_json, "out_json");
        emit(out_json, rw::io::distribution_to_json(d->dist));
    });
}

rw_status rw_dist_slice(const rw_dist* d, const char* variable, size_t value, rw_dist** out, double* out_probability) {
    return guarded([&] {
        require(d, "distribution");
        require(variable, "variable");
        require(out, "out");
        std::visit(
            [&](const auto& x) {
                auto s = rw::dist::condition_slice(x, variable, value);
                if (out_probability != nullptr) *out_probability = rw::to_double(s.probability);
                *out = new rw_dist(rw::io::AnyDistribution(std::move(s.slice)));
            },
            d->dist);
    });
}

rw_status rw_dist_marginalize(const rw_dist* d, const char* const* keep, size_t nkeep, rw_dist** out) {
    return guarded([&] {
        require(d, "distribution");
        require(out, "out");
        const auto names = names_of(keep, nkeep);
        std::visit(
            [&](const auto& x) {
                *out = new rw_dist(rw::io::AnyDistribution(
                    rw::dist::marginalize(x, std::span<const std::string>(names))));
            },
            d->dist);
    });
}

rw_status rw_dist_expectations(const rw_dist* d, char** out_json) {
    return guarded([&] {
        require(d, "distribution");
        require(out_json, "out_json");
        std::visit([&](const auto& x) { emit(out_json, moments_json(rw::dist::probs_to_expectations(x))); },
                   d->dist);
    });
}

rw_status rw_dist_from_expectations(const char* text, rw_dist** out) {
    return guarded([&] {
        require(text, "json");
        require(out, "out");
        const auto doc = rw::io::parse(text);
        const auto names = doc.at("names").get<std::vector<std::string>>();
        const auto& moments = doc.at("moments");
        bool rational = false;
        for (const auto& m : moments) rational = rational || m.is_string();
        if (rational) {
            rw::dist::ExpectationTable<rw::Rational> t{names, {}};
            for (const auto& m : moments)
                t.moments.push_back(m.is_string() ? rw::parse_rational(m.get<std::string>())
                                                  : rw::parse_rational(m.dump()));
            *out = new rw_dist(rw::io::AnyDistribution(rw::dist::expectations_to_probs(t)));
        } else {
            rw::dist::ExpectationTable<double> t{names, moments.get<std::vector<double>>()};
            *out = new rw_dist(rw::io::AnyDistribution(rw::dist::expectations_to_probs(t)));
        }
    });
}

rw_status rw_rank(const rw_dist* d, const rw_config* cfg, const char* certificate_json, rw_rank_result* out,
                  char** out_json) {
    return guarded([&] {
        require(d, "distribution");
        std::vector<rw::nnrank::NNFactorization> supplied;
        if (certificate_json != nullptr)
            supplied.push_back(rw::io::factorization_from_json(rw::io::parse(certificate_json)));
        const auto b = rank_of(d->dist, config_or_default(cfg), supplied);
        fill(out, b.lower, b.upper);
        emit(out_json, rw::io::rank_bounds_to_json(b));
    });
}

rw_status rw_factorization_to_latent(const char* factorization_json, char** out_json) {
    return guarded([&] {
        require(factorization_json, "factorization_json");
        require(out_json, "out_json");
        const auto f = rw::io::factorization_from_json(rw::io::parse(factorization_json));
        emit(out_json, rw::io::latent_to_json(rw::nnrank::factorization_to_latent(f)));
    });
}

rw_status rw_psd_rank(const rw_dist* d, const rw_config* cfg, const char* certificate_json, size_t search_width,
                      rw_rank_result* out, char** out_json) {
    return guarded([&] {
        require(d, "distribution");
        const auto& c = config_or_default(cfg);
        const auto nn = rank_of(d->dist, c, {});
        const auto m = rw::io::to_matrix(d->dist);
        std::optional<rw::psd::PsdFactorization> cert;
        if (certificate_json != nullptr) cert = rw::io::psd_factorization_from_json(rw::io::parse(certificate_json));
        std::vector<std::string> search_notes;
        if (search_width > 0 && !cert) {
            rw::psd::PsdSearchConfig sc;
            sc.tol = c.psd_tol;
            sc.seed = c.rank.seed;
            sc.time_budget = c.psd_budget;
            cert = rw::psd::psd_search(m, search_width, sc);
            search_notes.push_back(cert ? "numerical search found a width-" + std::to_string(search_width) +
                                              " PSD factorization"
                                        : "numerical search for a width-" + std::to_string(search_width) +
                                              " PSD factorization failed; this proves nothing");
        }
        auto b = rw::psd::psd_rank_bounds(m, nn, cert, c.psd_tol);
        b.notes.insert(b.notes.begin(), search_notes.begin(), search_notes.end());
        fill(out, b.lower, b.upper);
        json doc = rw::io::psd_bounds_to_json(b);
        doc["nonnegative_rank"] = {{"lower", nn.lower}, {"upper", nn.upper}, {"exact", nn.exact}};
        emit(out_json, doc);
    });
}

rw_status rw_witness(const rw_graph* g, const rw_dist* d, const char* x, const char* y,
                     const char* const* conditioning, size_t nconditioning, const rw_config* cfg,
                     rw_verdict* out_verdict, char** out_json) {
    return guarded([&] {
        require(g, "graph");
        require(d, "distribution");
        const auto& c = config_or_default(cfg);
        rw::witness::CausalHypothesis h{g->graph, {}, {}, {}};
        const auto& hyp = g->hypothesis;
        const auto& axes = d->names;
        if (x != nullptr) h.x = x;
        else if (hyp.x) h.x = *hyp.x;
        else if (!axes.empty()) h.x = axes[0];
        if (y != nullptr) h.y = y;
        else if (hyp.y) h.y = *hyp.y;
        else if (axes.size() > 1) h.y = axes[1];
        if (h.x.empty() || h.y.empty())
            throw rw::Error(rw::ErrorCode::NoObservedData, "cannot determine the X and Y variables");
        if (conditioning != nullptr) {
            h.conditioning = names_of(conditioning, nconditioning);
        } else if (hyp.conditioning) {
            h.conditioning = *hyp.conditioning;
        } else {
            for (const auto& a : axes)
                if (a != h.x && a != h.y) h.conditioning.push_back(a);
        }
        const auto data = as_requested(d->dist, c);
        const auto rc = rank_config(c, is_rational(d->dist));
        const auto v = std::visit([&](const auto& dd) { return rw::witness::witness_direct_influence(h, dd, rc); },
                                  data);
        if (out_verdict != nullptr) *out_verdict = to_c(v.status);
        json doc = rw::io::verdict_to_json(v);
        doc["hypothesis"] = {{"x", h.x}, {"y", h.y}, {"conditioning", h.conditioning}};
        emit(out_json, doc);
    });
}

rw_status rw_cardinality_check(const rw_dist* d, uint64_t separator_cardinality, const rw_config* cfg,
                               rw_verdict* out_verdict, char** out_json) {
    return guarded([&] {
        require(d, "distribution");
        const auto& c = config_or_default(cfg);
        const auto data = as_requested(d->dist, c);
        const auto rc = rank_config(c, is_rational(d->dist));
        const auto v = std::visit(
            [&](const auto& dd) { return rw::witness::corollary1_check(dd, separator_cardinality, rc); }, data);
        if (out_verdict != nullptr) *out_verdict = to_c(v.status);
        emit(out_json, rw::io::verdict_to_json(v));
    });
}

rw_status rw_lower_bound_hidden_cardinality(const rw_dist* d, const rw_config* cfg, size_t* out) {
    return guarded([&] {
        require(d, "distribution");
        require(out, "out");
        const auto& c = config_or_default(cfg);
        const auto data = as_requested(d->dist, c);
        const auto rc = rank_config(c, is_rational(d->dist));
        *out = std::visit([&](const auto& dd) { return rw::witness::lower_bound_hidden_cardinality(dd, rc); }, data);
    });
}

rw_status rw_perfect_correlation(const double ex_x[2], const double ex_y[2], const double ex_xy[2], double tol,
                                 rw_verdict* out_verdict, char** out_json) {
    return guarded([&] {
        require(ex_x, "ex_x");
        require(ex_y, "ex_y");
        require(ex_xy, "ex_xy");
        const auto v = rw::witness::perfect_correlation_check({ex_x[0], ex_x[1]}, {ex_y[0], ex_y[1]},
                                                              {ex_xy[0], ex_xy[1]}, tol);
        if (out_verdict != nullptr) *out_verdict = to_c(v.status);
        emit(out_json, rw::io::verdict_to_json(v));
    });
}

rw_status rw_response_oracle(const double target_ex_x[2], double tol, int grid_steps, int* out_feasible,
                             char** out_json) {
    return guarded([&] {
        require(target_ex_x, "target_ex_x");
        const auto r = rw::witness::brute_force_response_oracle({target_ex_x[0], target_ex_x[1]}, tol, grid_steps);
        if (out_feasible != nullptr) *out_feasible = r.feasible ? 1 : 0;
        emit(out_json, rw::io::oracle_report_to_json(r));
    });
}

rw_status rw_oracle_grid_csv(int grid, double tol, int grid_steps, char** out_csv) {
    return guarded([&] {
        require(out_csv, "out_csv");
        *out_csv = dup(rw::io::oracle_grid_csv(grid, tol, grid_steps));
    });
}

rw_status rw_protocol_simulate(const char* protocol_json, rw_dist** out_dist, char** out_json) {
    return guarded([&] {
        require(protocol_json, "protocol_json");
        const auto p = rw::io::protocol_from_json(rw::io::parse(protocol_json));
        auto joint = rw::io::simulate(p);
        const auto fact = rw::io::structural_factorization(p);
        if (out_json != nullptr) {
            json doc{{"type", rw::io::protocol_type(p)},
                     {"distribution", rw::io::distribution_to_json(joint)},
                     {"factorization", rw::io::factorization_to_json(fact)}};
            emit(out_json, doc);
        }
        if (out_dist != nullptr) *out_dist = new rw_dist(std::move(joint));
    });
}

rw_status rw_protocol_rank(const char* protocol_json, const rw_config* cfg, rw_rank_result* out, char** out_json) {
    return guarded([&] {
        require(protocol_json, "protocol_json");
        const auto p = rw::io::protocol_from_json(rw::io::parse(protocol_json));
        const auto joint = rw::io::simulate(p);
        auto fact = rw::io::structural_factorization(p);
        fact.residual = rw::nnrank::relative_residual(rw::io::to_matrix(joint), fact);
        const std::vector<rw::nnrank::NNFactorization> supplied{fact};
        const auto b = rank_of(joint, config_or_default(cfg), supplied);
        fill(out, b.lower, b.upper);
        json doc = rw::io::rank_bounds_to_json(b);
        doc["protocol_width"] = fact.r();
        emit(out_json, doc);
    });
}

rw_status rw_complexity(const rw_dist* d, const rw_config* cfg, char** out_json) {
    return guarded([&] {
        require(d, "distribution");
        require(out_json, "out_json");
        const auto b = rank_of(d->dist, config_or_default(cfg), {});
        emit(out_json, rw::io::complexity_to_json(rw::protocol::correlation_complexity(b)));
    });
}

rw_status rw_tradeoff(const rw_dist* d, uint64_t card_z1, uint64_t card_z2, const rw_config* cfg, int* out_holds,
                      char** out_json) {
    return guarded([&] {
        require(d, "distribution");
        const auto b = rank_of(d->dist, config_or_default(cfg), {});
        const auto r = rw::protocol::tradeoff_check(card_z1, card_z2, b);
        if (out_holds != nullptr) *out_holds = r.holds ? 1 : 0;
        json doc = rw::io::tradeoff_to_json(r);
        doc["z1"] = card_z1;
        doc["z2"] = card_z2;
        doc["rank_upper"] = b.upper;
        emit(out_json, doc);
    });
}

}  // extern "C"
