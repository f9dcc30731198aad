#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rankwitness/rankwitness.h"
#include "schema_check.hpp"

using nlohmann::json;

namespace {

enum Exit { kOk = 0, kInternal = 1, kUsage = 2, kRefuted = 3, kInconclusive = 4, kInput = 5 };

// Raised for anything the user can fix in their input; maps to exit 5.
struct InputError {
    std::string message;
};

struct StringDeleter {
    void operator()(char* s) const { rw_string_free(s); }
};
using CString = std::unique_ptr<char, StringDeleter>;
struct GraphDeleter {
    void operator()(rw_graph* g) const { rw_graph_free(g); }
};
struct DistDeleter {
    void operator()(rw_dist* d) const { rw_dist_free(d); }
};
struct ConfigDeleter {
    void operator()(rw_config* c) const { rw_config_free(c); }
};
using Graph = std::unique_ptr<rw_graph, GraphDeleter>;
using Dist = std::unique_ptr<rw_dist, DistDeleter>;
using Config = std::unique_ptr<rw_config, ConfigDeleter>;

void check(rw_status s) {
    if (s == RW_OK) return;
    if (s == RW_INTERNAL_ERROR) throw std::runtime_error(rw_last_error());
    throw InputError{rw_last_error()};
}

json take_json(char* raw) {
    CString owned(raw);
    return json::parse(owned.get());
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError{"IoError: cannot open '" + path + "'"};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

Dist load_dist(const std::string& path) {
    const std::string text = read_file(path);
    rw_dist* d = nullptr;
    check(ends_with(path, ".csv") ? rw_dist_from_csv(text.c_str(), &d) : rw_dist_from_json(text.c_str(), &d));
    return Dist(d);
}

Graph load_graph(const std::string& path) {
    const std::string text = read_file(path);
    rw_graph* g = nullptr;
    check(rw_graph_from_json(text.c_str(), &g));
    return Graph(g);
}

std::vector<const char*> c_names(const std::vector<std::string>& names) {
    std::vector<const char*> out;
    for (const auto& n : names) out.push_back(n.c_str());
    return out;
}

int verdict_exit(rw_verdict v) {
    switch (v) {
        case RW_CONSISTENT: return kOk;
        case RW_REFUTED: return kRefuted;
        case RW_INCONCLUSIVE: return kInconclusive;
    }
    return kInconclusive;
}

void render_table(const json& doc, std::ostream& os, const std::string& prefix = "") {
    for (const auto& [key, value] : doc.items()) {
        const std::string name = prefix + key;
        if (value.is_object() && !value.empty() && value.size() <= 8 && prefix.empty()) {
            render_table(value, os, name + ".");
            continue;
        }
        os << name;
        for (std::size_t pad = name.size(); pad < 24; ++pad) os << ' ';
        if (value.is_string()) {
            os << ' ' << value.get<std::string>() << '\n';
        } else if (value.is_array() && !value.empty() && (value[0].is_object() || value[0].is_array())) {
            os << '\n';
            for (const auto& item : value) os << "    " << item.dump() << '\n';
        } else if (value.is_array() && !value.empty() && value[0].is_string()) {
            os << '\n';
            for (const auto& item : value) os << "    " << item.get<std::string>() << '\n';
        } else {
            os << ' ' << value.dump() << '\n';
        }
    }
}

struct Globals {
    std::string format = "json";
    std::string arith = "auto";
    int restarts = 32;
    int max_iters = 5000;
    std::uint64_t seed = 0;
    std::size_t lb_support = 24;
};

Config make_config(const Globals& g, std::optional<double> tol = std::nullopt) {
    Config c(rw_config_new());
    if (!c) throw std::runtime_error("out of memory");
    check(rw_config_set_restarts(c.get(), g.restarts));
    check(rw_config_set_max_iters(c.get(), g.max_iters));
    check(rw_config_set_seed(c.get(), g.seed));
    check(rw_config_set_exact_lb_max_support(c.get(), g.lb_support));
    check(rw_config_set_arith(c.get(), g.arith == "exact"   ? RW_ARITH_EXACT
                                       : g.arith == "float" ? RW_ARITH_FLOAT
                                                            : RW_ARITH_AUTO));
    if (tol) check(rw_config_set_tol(c.get(), *tol));
    return c;
}

void emit(const Globals& g, const std::string& schema, const json& doc) {
    const auto errors = schema_for(schema).check(doc);
    if (!errors.empty()) {
        std::string msg = "output failed schema '" + schema + "':";
        for (const auto& e : errors) msg += "\n  " + e;
        throw std::runtime_error(msg);
    }
    if (g.format == "table") {
        render_table(doc, std::cout);
    } else {
        std::cout << doc.dump(2) << '\n';
    }
}

std::optional<std::uint64_t> env_seed() {
    const char* raw = std::getenv("RANKWITNESS_SEED");
    if (raw == nullptr || *raw == '\0') return std::nullopt;
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(raw, &used, 10);
        if (used != std::string(raw).size() || std::string(raw).front() == '-') throw std::invalid_argument(raw);
        return v;
    } catch (const std::exception&) {
        throw CLI::ValidationError("RANKWITNESS_SEED", "must be a nonnegative integer, got '" + std::string(raw) + "'");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Causal hypothesis testing through nonnegative and PSD rank bounds"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(rw_version()));

    Globals g;
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "table"}));
    app.add_option("--arith", g.arith, "Arithmetic for rank certificates (auto: exact for rational input)")
        ->check(CLI::IsMember({"auto", "exact", "float"}));
    app.add_option("--restarts", g.restarts, "Factorization search restarts (0 disables the search)")
        ->check(CLI::Range(0, 100000));
    app.add_option("--max-iters", g.max_iters, "Iterations per restart")->check(CLI::Range(1, 10000000));
    auto* seed_opt = app.add_option("--seed", g.seed, "Random seed (default: $RANKWITNESS_SEED or 0)");
    app.add_option("--exact-lb-max-support", g.lb_support, "Largest support for the exact rectangle cover")
        ->check(CLI::Range(0, 32));

    std::function<int()> action;

    // rank
    auto* rank = app.add_subcommand("rank", "Certified nonnegative rank interval of a two-variable distribution");
    std::string rank_matrix, rank_cert;
    double rank_tol = 1e-9;
    bool rank_latent = false;
    rank->add_option("--matrix,--data", rank_matrix, "Distribution (.json or .csv)")->required();
    rank->add_option("--certificate", rank_cert, "Factorization to verify and use as upper bound");
    rank->add_option("--tol", rank_tol, "Relative Frobenius residual accepted for factorizations")
        ->check(CLI::Range(1e-300, 0.999999));
    rank->add_flag("--latent", rank_latent, "Also report the latent decomposition of the upper certificate");
    rank->callback([&] {
        action = [&] {
            auto d = load_dist(rank_matrix);
            auto cfg = make_config(g, rank_tol);
            std::string cert_text;
            if (!rank_cert.empty()) cert_text = read_file(rank_cert);
            char* out = nullptr;
            check(rw_rank(d.get(), cfg.get(), rank_cert.empty() ? nullptr : cert_text.c_str(), nullptr, &out));
            json doc = take_json(out);
            if (rank_latent) {
                doc["latent"] = nullptr;
                if (!doc["upper_certificate"].is_null()) {
                    char* lat = nullptr;
                    if (rw_factorization_to_latent(doc["upper_certificate"].dump().c_str(), &lat) == RW_OK)
                        doc["latent"] = take_json(lat);
                    else
                        doc["notes"].push_back(std::string("latent decomposition unavailable: ") + rw_last_error());
                }
            }
            emit(g, "rank", doc);
            return int{kOk};
        };
    });

    // psd-rank
    auto* psd = app.add_subcommand("psd-rank", "Bounds on the positive semidefinite rank");
    std::string psd_matrix, psd_cert;
    double psd_tol = 1e-8, psd_budget = 60.0;
    std::size_t psd_width = 0;
    psd->add_option("--matrix,--data", psd_matrix, "Distribution (.json or .csv)")->required();
    psd->add_option("--certificate", psd_cert, "PSD factorization to verify");
    psd->add_option("--search", psd_width, "Search numerically for a factorization of this width")
        ->check(CLI::Range(0, 64));
    psd->add_option("--tol", psd_tol, "Max entry error accepted for PSD factorizations")
        ->check(CLI::Range(1e-300, 0.999999));
    psd->add_option("--time-budget", psd_budget, "Seconds allowed for the search")->check(CLI::Range(0.0, 86400.0));
    psd->callback([&] {
        action = [&] {
            auto d = load_dist(psd_matrix);
            auto cfg = make_config(g);
            check(rw_config_set_psd_tol(cfg.get(), psd_tol));
            check(rw_config_set_psd_time_budget_ms(cfg.get(), static_cast<std::int64_t>(psd_budget * 1000.0)));
            std::string cert_text;
            if (!psd_cert.empty()) cert_text = read_file(psd_cert);
            char* out = nullptr;
            check(rw_psd_rank(d.get(), cfg.get(), psd_cert.empty() ? nullptr : cert_text.c_str(), psd_width, nullptr,
                              &out));
            emit(g, "psd-rank", take_json(out));
            return int{kOk};
        };
    });

    // dsep
    auto* dsep = app.add_subcommand("dsep", "d-separation query, or blocking test for one path");
    std::string dsep_graph;
    std::vector<std::string> dsep_x, dsep_y, dsep_z, dsep_path;
    dsep->add_option("--graph", dsep_graph, "Graph JSON")->required();
    auto* ox = dsep->add_option("--x", dsep_x, "Comma-separated X set")->delimiter(',');
    auto* oy = dsep->add_option("--y", dsep_y, "Comma-separated Y set")->delimiter(',');
    dsep->add_option("--z", dsep_z, "Comma-separated conditioning set")->delimiter(',');
    auto* opath = dsep->add_option("--path", dsep_path, "Comma-separated path to test for blocking")->delimiter(',');
    ox->needs(oy);
    oy->needs(ox);
    opath->excludes(ox)->excludes(oy);
    dsep->callback([&] {
        if (dsep_path.empty() && dsep_x.empty()) throw CLI::ValidationError("dsep", "give --x and --y, or --path");
        action = [&] {
            auto gr = load_graph(dsep_graph);
            const auto z = c_names(dsep_z);
            int result = 0;
            json doc{{"z", dsep_z}};
            if (!dsep_path.empty()) {
                const auto p = c_names(dsep_path);
                check(rw_graph_path_blocked(gr.get(), p.data(), p.size(), z.data(), z.size(), &result));
                doc["path"] = dsep_path;
                doc["blocked"] = result != 0;
            } else {
                const auto x = c_names(dsep_x), y = c_names(dsep_y);
                check(rw_graph_d_separated(gr.get(), x.data(), x.size(), y.data(), y.size(), z.data(), z.size(),
                                           &result));
                doc["x"] = dsep_x;
                doc["y"] = dsep_y;
                doc["d_separated"] = result != 0;
            }
            emit(g, "dsep", doc);
            return int{kOk};
        };
    });

    // separators
    auto* seps = app.add_subcommand("separators", "Minimal sets of hidden variables separating X and Y");
    std::string seps_graph, seps_x, seps_y;
    std::vector<std::string> seps_z;
    seps->add_option("--graph", seps_graph, "Graph JSON")->required();
    seps->add_option("--x", seps_x, "X variable")->required();
    seps->add_option("--y", seps_y, "Y variable")->required();
    seps->add_option("--z", seps_z, "Comma-separated observed conditioning set")->delimiter(',');
    seps->callback([&] {
        action = [&] {
            auto gr = load_graph(seps_graph);
            const auto z = c_names(seps_z);
            char* out = nullptr;
            check(rw_graph_hidden_separators(gr.get(), seps_x.c_str(), seps_y.c_str(), z.data(), z.size(), &out));
            json doc = take_json(out);
            doc["x"] = seps_x;
            doc["y"] = seps_y;
            doc["conditioning"] = seps_z;
            emit(g, "separators", doc);
            return int{kOk};
        };
    });

    // dot
    auto* dot = app.add_subcommand("dot", "Graphviz rendering of a graph (hidden variables dashed)");
    std::string dot_graph;
    dot->add_option("--graph", dot_graph, "Graph JSON")->required();
    dot->callback([&] {
        action = [&] {
            auto gr = load_graph(dot_graph);
            char* out = nullptr;
            check(rw_graph_to_dot(gr.get(), &out));
            CString owned(out);
            std::cout << owned.get();
            return int{kOk};
        };
    });

    // witness
    auto* wit = app.add_subcommand("witness", "Test a causal hypothesis against observed data");
    std::string wit_graph, wit_data, wit_x, wit_y;
    std::vector<std::string> wit_cond;
    bool wit_no_cond = false;
    double wit_tol = 1e-9;
    std::uint64_t wit_card = 0;
    auto* wg = wit->add_option("--graph", wit_graph, "Hypothesis graph JSON");
    wit->add_option("--data", wit_data, "Observed distribution (.json or .csv)")->required();
    wit->add_option("--x", wit_x, "X variable (default: hypothesis block, else first data axis)");
    wit->add_option("--y", wit_y, "Y variable (default: hypothesis block, else second data axis)");
    auto* wc = wit->add_option("--conditioning", wit_cond, "Comma-separated observed conditioning set")
                   ->delimiter(',');
    auto* wnc = wit->add_flag("--no-conditioning", wit_no_cond, "Condition on nothing");
    wc->excludes(wnc);
    auto* wcard = wit->add_option("--cardinality", wit_card, "Promised separator cardinality; replaces --graph")
                      ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 62));
    wcard->excludes(wg);
    wit->add_option("--tol", wit_tol, "Relative residual accepted for factorizations")
        ->check(CLI::Range(1e-300, 0.999999));
    wit->callback([&] {
        if (wit_graph.empty() && wit_card == 0) throw CLI::ValidationError("witness", "give --graph or --cardinality");
        action = [&] {
            auto d = load_dist(wit_data);
            auto cfg = make_config(g, wit_tol);
            rw_verdict v = RW_INCONCLUSIVE;
            char* out = nullptr;
            if (wit_card != 0) {
                check(rw_cardinality_check(d.get(), wit_card, cfg.get(), &v, &out));
            } else {
                auto gr = load_graph(wit_graph);
                const auto cond = c_names(wit_cond);
                const char* const empty[1] = {nullptr};
                const char* const* cond_ptr = nullptr;
                if (!wit_cond.empty()) cond_ptr = cond.data();
                else if (wit_no_cond) cond_ptr = empty;
                check(rw_witness(gr.get(), d.get(), wit_x.empty() ? nullptr : wit_x.c_str(),
                                 wit_y.empty() ? nullptr : wit_y.c_str(), cond_ptr, wit_cond.size(), cfg.get(), &v,
                                 &out));
            }
            emit(g, "verdict", take_json(out));
            return verdict_exit(v);
        };
    });

    // perfect-corr
    auto* pc = app.add_subcommand("perfect-corr", "Binary perfectly-correlated X, Y with a common cause");
    std::vector<double> pc_x, pc_y, pc_xy{1.0, 1.0};
    double pc_tol = 1e-6;
    pc->add_option("--ex-x", pc_x, "<X|z=+1>,<X|z=-1>")->delimiter(',')->expected(2)->required();
    pc->add_option("--ex-y", pc_y, "<Y|z=+1>,<Y|z=-1>")->delimiter(',')->expected(2)->required();
    pc->add_option("--ex-xy", pc_xy, "<XY|z=+1>,<XY|z=-1> (default 1,1)")->delimiter(',')->expected(2);
    pc->add_option("--tol", pc_tol, "Tolerance on the moment conditions")->check(CLI::Range(0.0, 1.0));
    pc->callback([&] {
        action = [&] {
            rw_verdict v = RW_INCONCLUSIVE;
            char* out = nullptr;
            check(rw_perfect_correlation(pc_x.data(), pc_y.data(), pc_xy.data(), pc_tol, &v, &out));
            emit(g, "verdict", take_json(out));
            return verdict_exit(v);
        };
    });

    // oracle
    auto* orc = app.add_subcommand("oracle", "Brute-force response-function enumeration (CSV grid or one target)");
    int orc_grid = 0, orc_steps = 256;
    std::vector<double> orc_target;
    double orc_tol = 1.0 / 128.0;
    auto* og = orc->add_option("--grid", orc_grid, "Points per axis; dumps the achievable region as CSV")
                   ->check(CLI::Range(2, 1025));
    auto* ot = orc->add_option("--target", orc_target, "<X|z=+1>,<X|z=-1> to test")->delimiter(',')->expected(2);
    og->excludes(ot);
    orc->add_option("--steps", orc_steps, "Grid steps for P(U=+1)")->check(CLI::Range(1, 65536));
    orc->add_option("--tol", orc_tol, "Feasibility tolerance (Chebyshev distance)")->check(CLI::Range(0.0, 2.0));
    orc->callback([&] {
        if (orc_grid == 0 && orc_target.empty()) throw CLI::ValidationError("oracle", "give --grid or --target");
        action = [&] {
            char* out = nullptr;
            if (orc_grid != 0) {
                check(rw_oracle_grid_csv(orc_grid, orc_tol, orc_steps, &out));
                CString owned(out);
                std::cout << owned.get();
                return int{kOk};
            }
            check(rw_response_oracle(orc_target.data(), orc_tol, orc_steps, nullptr, &out));
            json doc = take_json(out);
            doc["target"] = orc_target;
            emit(g, "oracle", doc);
            return int{kOk};
        };
    });

    // protocol {simulate, complexity, tradeoff}
    auto* proto = app.add_subcommand("protocol", "Seed, message and hybrid protocols");
    proto->require_subcommand(1);
    auto* psim = proto->add_subcommand("simulate", "Exact output distribution of a protocol");
    std::string psim_in;
    psim->add_option("--in", psim_in, "Protocol JSON")->required();
    psim->callback([&] {
        action = [&] {
            const std::string text = read_file(psim_in);
            auto cfg = make_config(g);
            char* out = nullptr;
            check(rw_protocol_simulate(text.c_str(), nullptr, &out));
            json doc = take_json(out);
            char* rank_out = nullptr;
            check(rw_protocol_rank(text.c_str(), cfg.get(), nullptr, &rank_out));
            doc["rank"] = take_json(rank_out);
            emit(g, "protocol-simulate", doc);
            return int{kOk};
        };
    });

    std::string cx_matrix;
    auto complexity_action = [&] {
        action = [&] {
            auto d = load_dist(cx_matrix);
            auto cfg = make_config(g);
            char* out = nullptr;
            check(rw_complexity(d.get(), cfg.get(), &out));
            emit(g, "complexity", take_json(out));
            return int{kOk};
        };
    };
    auto* pcx = proto->add_subcommand("complexity", "Randomized correlation/communication complexity in bits");
    pcx->add_option("--matrix,--data", cx_matrix, "Distribution (.json or .csv)")->required();
    pcx->callback(complexity_action);
    auto* cx = app.add_subcommand("complexity", "Same as 'protocol complexity'");
    cx->add_option("--matrix,--data", cx_matrix, "Distribution (.json or .csv)")->required();
    cx->callback(complexity_action);

    auto* ptr = proto->add_subcommand("tradeoff", "Check |Z1|*|Z2| against the certified rank lower bound");
    std::string tr_matrix;
    std::uint64_t tr_z1 = 0, tr_z2 = 0;
    ptr->add_option("--matrix,--data", tr_matrix, "Distribution (.json or .csv)")->required();
    ptr->add_option("--z1", tr_z1, "Seed cardinality")->required()->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 31));
    ptr->add_option("--z2", tr_z2, "Message cardinality")->required()->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 31));
    ptr->callback([&] {
        action = [&] {
            auto d = load_dist(tr_matrix);
            auto cfg = make_config(g);
            char* out = nullptr;
            check(rw_tradeoff(d.get(), tr_z1, tr_z2, cfg.get(), nullptr, &out));
            emit(g, "tradeoff", take_json(out));
            return int{kOk};
        };
    });

    // slice
    auto* sl = app.add_subcommand("slice", "Condition on one variable, or marginalize onto a set");
    std::string sl_data, sl_var;
    std::size_t sl_value = 0;
    std::vector<std::string> sl_keep;
    sl->add_option("--data,--matrix", sl_data, "Distribution (.json or .csv)")->required();
    auto* sv = sl->add_option("--var", sl_var, "Conditioning variable");
    auto* sval = sl->add_option("--value", sl_value, "Conditioning value (index)");
    auto* sk = sl->add_option("--keep", sl_keep, "Comma-separated axes to keep")->delimiter(',');
    sv->needs(sval);
    sval->needs(sv);
    sk->excludes(sv);
    sl->callback([&] {
        if (sl_var.empty() && sl_keep.empty()) throw CLI::ValidationError("slice", "give --var/--value or --keep");
        action = [&] {
            auto d = load_dist(sl_data);
            rw_dist* raw = nullptr;
            json doc;
            if (!sl_var.empty()) {
                double p = 0.0;
                check(rw_dist_slice(d.get(), sl_var.c_str(), sl_value, &raw, &p));
                doc = {{"variable", sl_var}, {"value", sl_value}, {"probability", p}};
            } else {
                const auto keep = c_names(sl_keep);
                check(rw_dist_marginalize(d.get(), keep.data(), keep.size(), &raw));
                doc = {{"keep", sl_keep}};
            }
            Dist result(raw);
            char* out = nullptr;
            check(rw_dist_to_json(result.get(), &out));
            doc["distribution"] = take_json(out);
            emit(g, "slice", doc);
            return int{kOk};
        };
    });

    // moments
    auto* mo = app.add_subcommand("moments", "Moments <V_S> of a distribution over binary (+1/-1) variables");
    std::string mo_data;
    mo->add_option("--data,--matrix", mo_data, "Distribution (.json or .csv)")->required();
    mo->callback([&] {
        action = [&] {
            auto d = load_dist(mo_data);
            char* out = nullptr;
            check(rw_dist_expectations(d.get(), &out));
            emit(g, "moments", take_json(out));
            return int{kOk};
        };
    });

    // latent
    auto* lat = app.add_subcommand("latent", "Latent-variable form of a factorization");
    std::string lat_in;
    lat->add_option("--factorization,--in", lat_in, "Factorization JSON")->required();
    lat->callback([&] {
        action = [&] {
            const std::string text = read_file(lat_in);
            char* out = nullptr;
            check(rw_factorization_to_latent(text.c_str(), &out));
            emit(g, "latent", take_json(out));
            return int{kOk};
        };
    });

    try {
        app.parse(argc, argv);
        if (seed_opt->count() == 0)
            if (auto s = env_seed()) g.seed = *s;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        return action();
    } catch (const InputError& e) {
        std::cerr << "error: " << e.message << '\n';
        return kInput;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    }
}
