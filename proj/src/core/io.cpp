#include "io.hpp"

#include <cmath>
#include <sstream>

#include "error.hpp"

namespace rankwitness::io {

namespace {

[[noreturn]] void schema_error(const std::string& what) {
    throw Error(ErrorCode::ParseError, what);
}

const json& require(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) schema_error(std::string("missing field '") + key + "'");
    return j.at(key);
}

std::string require_string(const json& j, const char* what) {
    if (!j.is_string()) schema_error(std::string(what) + " must be a string");
    return j.get<std::string>();
}

std::uint32_t require_cardinality(const json& j) {
    if (!j.is_number_integer() || j.get<long long>() < 1 || j.get<long long>() > (1ll << 24))
        schema_error("cardinality must be a positive integer");
    return static_cast<std::uint32_t>(j.get<long long>());
}

double to_float(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return parse_rational(j.get<std::string>()).get_d();
    schema_error("expected a number");
}

Rational to_exact(const json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number()) return parse_rational(j.dump());
    schema_error("expected a number or a \"p/q\" string");
}

void flatten(const json& j, std::vector<const json*>& out) {
    if (j.is_array()) {
        for (const auto& e : j) flatten(e, out);
    } else {
        out.push_back(&j);
    }
}

bool any_string(const json& j) {
    if (j.is_string()) return true;
    if (j.is_array() || j.is_object())
        for (const auto& e : j)
            if (any_string(e)) return true;
    return false;
}

bool wants_rational(const json& doc, const json& values) {
    if (doc.contains("encoding")) {
        const auto enc = require_string(doc.at("encoding"), "encoding");
        if (enc == "rational") return true;
        if (enc == "float") return false;
        schema_error("encoding must be \"float\" or \"rational\"");
    }
    return any_string(values);
}

template <class T>
std::vector<T> vector_of(const json& j, const char* what) {
    if (!j.is_array()) schema_error(std::string(what) + " must be an array");
    std::vector<T> out;
    for (const auto& e : j) {
        if constexpr (std::same_as<T, double>) {
            out.push_back(to_float(e));
        } else {
            out.push_back(to_exact(e));
        }
    }
    return out;
}

template <class T>
std::vector<std::vector<T>> rows_of(const json& j, const char* what) {
    if (!j.is_array()) schema_error(std::string(what) + " must be an array of arrays");
    std::vector<std::vector<T>> out;
    for (const auto& e : j) out.push_back(vector_of<T>(e, what));
    return out;
}

template <class T>
std::vector<std::vector<std::vector<T>>> cubes_of(const json& j, const char* what) {
    if (!j.is_array()) schema_error(std::string(what) + " must be a nested array");
    std::vector<std::vector<std::vector<T>>> out;
    for (const auto& e : j) out.push_back(rows_of<T>(e, what));
    return out;
}

json vector_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from(const json& j) {
    const auto rows = rows_of<double>(j, "matrix");
    if (rows.empty()) return {};
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.front().size()) throw Error(ErrorCode::ShapeMismatch, "ragged matrix");
        for (std::size_t k = 0; k < rows[i].size(); ++k)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    }
    return m;
}

json axes_json(const std::vector<dist::Axis>& axes) {
    json out = json::array();
    for (const auto& a : axes) {
        json e{{"name", a.name}, {"cardinality", a.cardinality}};
        if (!a.labels.empty()) e["labels"] = a.labels;
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace

json parse(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

graph::CausalGraph graph_from_json(const json& j) {
    const auto& vars = require(j, "variables");
    if (!vars.is_array()) schema_error("variables must be an array");
    std::vector<graph::VariableSpec> specs;
    for (const auto& v : vars) {
        graph::VariableSpec s;
        s.name = require_string(require(v, "name"), "variable name");
        s.cardinality = require_cardinality(require(v, "cardinality"));
        if (v.contains("observed")) {
            if (!v.at("observed").is_boolean()) schema_error("observed must be a boolean");
            s.observed = v.at("observed").get<bool>();
        }
        specs.push_back(std::move(s));
    }
    std::vector<graph::NamedEdge> edges;
    if (j.contains("edges")) {
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2) schema_error("each edge must be a [parent, child] pair");
            edges.emplace_back(require_string(e[0], "edge endpoint"), require_string(e[1], "edge endpoint"));
        }
    }
    return graph::CausalGraph::build(std::move(specs), edges);
}

json graph_to_json(const graph::CausalGraph& g) {
    json vars = json::array();
    for (const auto& v : g.variables())
        vars.push_back({{"name", v.name}, {"cardinality", v.cardinality}, {"observed", v.observed}});
    json edges = json::array();
    for (const auto& [p, c] : g.edges()) edges.push_back({g.variable(p).name, g.variable(c).name});
    return {{"variables", vars}, {"edges", edges}};
}

HypothesisFields hypothesis_fields(const json& graph_doc) {
    HypothesisFields h;
    if (!graph_doc.is_object() || !graph_doc.contains("hypothesis")) return h;
    const auto& hj = graph_doc.at("hypothesis");
    if (hj.contains("x")) h.x = require_string(hj.at("x"), "hypothesis.x");
    if (hj.contains("y")) h.y = require_string(hj.at("y"), "hypothesis.y");
    if (hj.contains("conditioning")) {
        std::vector<std::string> c;
        for (const auto& e : hj.at("conditioning")) c.push_back(require_string(e, "conditioning entry"));
        h.conditioning = std::move(c);
    }
    return h;
}

AnyDistribution distribution_from_json(const json& j) {
    const auto& axes_j = require(j, "axes");
    if (!axes_j.is_array()) schema_error("axes must be an array");
    std::vector<dist::Axis> axes;
    for (const auto& a : axes_j) {
        dist::Axis axis;
        axis.name = require_string(require(a, "name"), "axis name");
        axis.cardinality = require_cardinality(require(a, "cardinality"));
        if (a.contains("labels")) axis.labels = a.at("labels").get<std::vector<int>>();
        axes.push_back(std::move(axis));
    }
    const auto& values_j = require(j, "values");
    std::vector<const json*> flat;
    flatten(values_j, flat);

    if (wants_rational(j, values_j)) {
        std::vector<Rational> values;
        for (const auto* v : flat) values.push_back(to_exact(*v));
        return dist::RationalDistribution::from_values(std::move(axes), std::move(values));
    }
    std::vector<double> values;
    for (const auto* v : flat) values.push_back(to_float(*v));
    return dist::FloatDistribution::from_values(std::move(axes), std::move(values));
}

json distribution_to_json(const dist::FloatDistribution& d) {
    return {{"axes", axes_json(d.axes())}, {"values", d.values()}, {"encoding", "float"}};
}

json distribution_to_json(const dist::RationalDistribution& d) {
    json values = json::array();
    for (const auto& v : d.values()) values.push_back(to_string(v));
    return {{"axes", axes_json(d.axes())}, {"values", values}, {"encoding", "rational"}};
}

json distribution_to_json(const AnyDistribution& d) {
    return std::visit([](const auto& x) { return distribution_to_json(x); }, d);
}

AnyDistribution distribution_from_csv(std::string_view text, const std::string& row_axis,
                                      const std::string& col_axis) {
    std::vector<std::vector<std::string>> cells;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::vector<std::string> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(cell);
        if (!cells.empty() && row.size() != cells.front().size())
            throw Error(ErrorCode::ShapeMismatch, "CSV rows have different lengths");
        cells.push_back(std::move(row));
    }
    if (cells.empty() || cells.front().empty()) throw Error(ErrorCode::ShapeMismatch, "empty CSV matrix");

    bool rational = false;
    for (const auto& row : cells)
        for (const auto& c : row) rational = rational || c.find('/') != std::string::npos;
    std::vector<dist::Axis> axes{{row_axis, static_cast<std::uint32_t>(cells.size()), {}},
                                 {col_axis, static_cast<std::uint32_t>(cells.front().size()), {}}};
    if (rational) {
        std::vector<Rational> values;
        for (const auto& row : cells)
            for (const auto& c : row) values.push_back(parse_rational(c));
        return dist::RationalDistribution::from_values(std::move(axes), std::move(values));
    }
    std::vector<double> values;
    for (const auto& row : cells)
        for (const auto& c : row) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(c, &used);
            } catch (const std::exception&) {
                throw Error(ErrorCode::ParseError, "not a number: '" + c + "'");
            }
            if (c.find_first_not_of(" \t", used) != std::string::npos)
                throw Error(ErrorCode::ParseError, "not a number: '" + c + "'");
            values.push_back(v);
        }
    return dist::FloatDistribution::from_values(std::move(axes), std::move(values));
}

nnrank::MatrixXd to_matrix(const AnyDistribution& d) {
    return std::visit(
        [](const auto& x) {
            if (x.num_axes() != 2) throw Error(ErrorCode::ShapeMismatch, "expected a two-axis distribution");
            nnrank::MatrixXd m(static_cast<Eigen::Index>(x.rows()), static_cast<Eigen::Index>(x.cols()));
            for (std::size_t i = 0; i < x.rows(); ++i)
                for (std::size_t k = 0; k < x.cols(); ++k)
                    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = to_double(x(i, k));
            return m;
        },
        d);
}

json factorization_to_json(const nnrank::NNFactorization& f) {
    json pairs = json::array();
    for (const auto& p : f.pairs) pairs.push_back({{"x", vector_json(p.x)}, {"y", vector_json(p.y)}});
    return {{"r", f.r()}, {"pairs", pairs}, {"residual", f.residual}};
}

nnrank::NNFactorization factorization_from_json(const json& j) {
    nnrank::NNFactorization f;
    for (const auto& p : require(j, "pairs")) {
        const auto x = vector_of<double>(require(p, "x"), "pair.x");
        const auto y = vector_of<double>(require(p, "y"), "pair.y");
        f.pairs.push_back({Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())),
                           Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()))});
    }
    if (j.contains("r") && j.at("r").get<std::size_t>() != f.r())
        throw Error(ErrorCode::ShapeMismatch, "field r disagrees with the number of pairs");
    if (j.contains("residual")) f.residual = to_float(j.at("residual"));
    return f;
}

json psd_factorization_to_json(const psd::PsdFactorization& f) {
    json e = json::array(), fs = json::array();
    for (const auto& m : f.e_factors) e.push_back(matrix_json(m));
    for (const auto& m : f.f_factors) fs.push_back(matrix_json(m));
    return {{"r", f.r}, {"E", e}, {"F", fs}};
}

psd::PsdFactorization psd_factorization_from_json(const json& j) {
    psd::PsdFactorization f;
    const auto& r = require(j, "r");
    if (!r.is_number_integer() || r.get<long long>() < 1) schema_error("r must be a positive integer");
    f.r = r.get<std::size_t>();
    for (const auto& m : require(j, "E")) f.e_factors.push_back(matrix_from(m));
    for (const auto& m : require(j, "F")) f.f_factors.push_back(matrix_from(m));
    return f;
}

json rank_bounds_to_json(const nnrank::RankBounds& b) {
    json lower = json::array();
    for (const auto& c : b.lower_certificates) lower.push_back({{"method", c.method}, {"value", c.value}});
    json out{{"lower", b.lower},
             {"upper", b.upper},
             {"exact", b.exact},
             {"lower_certificates", lower},
             {"upper_method", b.upper_method},
             {"notes", b.notes}};
    out["upper_certificate"] = b.upper_certificate ? factorization_to_json(*b.upper_certificate) : json(nullptr);
    return out;
}

json psd_bounds_to_json(const psd::PsdRankBounds& b) {
    json out{{"lower", b.lower}, {"upper", b.upper}, {"exact", b.lower == b.upper}, {"notes", b.notes}};
    out["upper_certificate"] = b.upper_certificate ? psd_factorization_to_json(*b.upper_certificate) : json(nullptr);
    return out;
}

json verdict_to_json(const witness::WitnessVerdict& v) {
    json evidence = json::array();
    for (const auto& e : v.evidence) {
        json assignment = json::object();
        for (const auto& [name, value] : e.assignment) assignment[name] = value;
        evidence.push_back({{"assignment", assignment},
                            {"probability", e.probability},
                            {"rank_lower", e.rank_lower},
                            {"rank_upper", e.rank_upper},
                            {"exact", e.exact},
                            {"separator_cardinality", e.separator_cardinality},
                            {"status", witness::to_string(e.status)}});
    }
    return {{"status", witness::to_string(v.status)}, {"message", v.message}, {"evidence", evidence},
            {"notes", v.notes}};
}

json oracle_report_to_json(const witness::OracleReport& r) {
    json out{{"feasible", r.feasible}, {"distance", r.distance}, {"notes", r.notes}};
    if (r.witness) {
        json table = json::object();
        const char* zs[] = {"+1", "-1"};
        for (int zi = 0; zi < 2; ++zi)
            for (int ui = 0; ui < 2; ++ui)
                table[std::string("z=") + zs[zi] + ",u=" + zs[ui]] = ((r.witness->response >> (2 * zi + ui)) & 1) ? -1 : 1;
        out["witness"] = {{"response", table},
                          {"p_u_plus", r.witness->p_u_plus},
                          {"attained", {r.witness->attained.first, r.witness->attained.second}}};
    } else {
        out["witness"] = nullptr;
    }
    return out;
}

json complexity_to_json(const protocol::ComplexityReport& r) {
    return {{"rank_lower", r.rank_bounds.lower},
            {"rank_upper", r.rank_bounds.upper},
            {"rcorr_bits", {r.rcorr_bits_lower, r.rcorr_bits_upper}},
            {"rcomm_bits", {r.rcomm_bits_lower, r.rcomm_bits_upper}},
            {"exact", r.exact},
            {"notes", r.rank_bounds.notes}};
}

json tradeoff_to_json(const protocol::TradeoffReport& r) {
    return {{"holds", r.holds}, {"capacity", r.capacity}, {"rank_lower", r.rank_lower}, {"margin", r.margin}};
}

json latent_to_json(const nnrank::LatentDecomposition& d) {
    json cx = json::array(), cy = json::array();
    for (const auto& v : d.cond_x) cx.push_back(vector_json(v));
    for (const auto& v : d.cond_y) cy.push_back(vector_json(v));
    return {{"p_z", vector_json(d.p_z)}, {"cond_x", cx}, {"cond_y", cy}, {"dropped_components", d.dropped_components}};
}

std::string oracle_grid_csv(int grid, double tol, int response_grid_steps) {
    if (grid < 2) throw Error(ErrorCode::InvalidArgument, "grid must have at least 2 points per axis");
    std::ostringstream os;
    os.precision(17);
    os << "ex_x_plus,ex_x_minus,feasible\n";
    for (int i = 0; i < grid; ++i)
        for (int k = 0; k < grid; ++k) {
            const double a = -1.0 + 2.0 * i / (grid - 1);
            const double b = -1.0 + 2.0 * k / (grid - 1);
            const auto rep = witness::brute_force_response_oracle({a, b}, tol, response_grid_steps);
            os << a << "," << b << "," << (rep.feasible ? 1 : 0) << "\n";
        }
    return os.str();
}

namespace {

template <Scalar T>
AnyProtocol protocol_typed(const json& j, const std::string& type) {
    const auto& enc = require(j, "encoders");
    if (type == "seed") {
        protocol::SeedProtocol<T> p;
        p.seed = vector_of<T>(require(j, "seed"), "seed");
        p.alice_encoder = rows_of<T>(require(enc, "alice"), "encoders.alice");
        p.bob_encoder = rows_of<T>(require(enc, "bob"), "encoders.bob");
        return p;
    }
    if (type == "message") {
        protocol::MessageProtocol<T> p;
        p.alice_dist = vector_of<T>(require(enc, "alice"), "encoders.alice");
        p.message_channel = rows_of<T>(require(enc, "channel"), "encoders.channel");
        p.bob_decoder = rows_of<T>(require(enc, "bob"), "encoders.bob");
        return p;
    }
    if (type == "hybrid") {
        protocol::HybridProtocol<T> p;
        p.seed = vector_of<T>(require(j, "seed"), "seed");
        p.alice_encoder = rows_of<T>(require(enc, "alice"), "encoders.alice");
        p.message_channel = cubes_of<T>(require(enc, "channel"), "encoders.channel");
        p.bob_decoder = cubes_of<T>(require(enc, "bob"), "encoders.bob");
        return p;
    }
    schema_error("protocol type must be \"seed\", \"message\" or \"hybrid\"");
}

}  // namespace

AnyProtocol protocol_from_json(const json& j) {
    const auto type = require_string(require(j, "type"), "type");
    if (wants_rational(j, j)) return protocol_typed<Rational>(j, type);
    return protocol_typed<double>(j, type);
}

std::string protocol_type(const AnyProtocol& p) {
    static const char* names[] = {"seed", "message", "hybrid", "seed", "message", "hybrid"};
    return names[p.index()];
}

AnyDistribution simulate(const AnyProtocol& p) {
    return std::visit(
        [](const auto& proto) -> AnyDistribution {
            if constexpr (requires { proto.bob_encoder; }) {
                return protocol::simulate_seed_protocol(proto);
            } else if constexpr (requires { proto.alice_dist; }) {
                return protocol::simulate_message_protocol(proto);
            } else {
                return protocol::simulate_hybrid_protocol(proto);
            }
        },
        p);
}

nnrank::NNFactorization structural_factorization(const AnyProtocol& p) {
    return std::visit(
        [](const auto& proto) {
            if constexpr (requires { proto.bob_encoder; }) {
                return protocol::seed_factorization(proto);
            } else if constexpr (requires { proto.alice_dist; }) {
                return protocol::message_factorization(proto);
            } else {
                return protocol::hybrid_factorization(proto);
            }
        },
        p);
}

}  // namespace rankwitness::io
