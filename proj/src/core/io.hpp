#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "causal_graph.hpp"
#include "distribution.hpp"
#include "nonneg_rank.hpp"
#include "protocol.hpp"
#include "psd_rank.hpp"
#include "witness.hpp"

namespace rankwitness::io {

using nlohmann::json;

/// Parses text into JSON, mapping syntax errors onto ParseError.
json parse(std::string_view text);

// Graphs: {"variables":[{"name":"X","cardinality":3,"observed":true}],"edges":[["Z","X"]]}
graph::CausalGraph graph_from_json(const json& j);
json graph_to_json(const graph::CausalGraph& g);

/// Optional "hypothesis":{"x":..,"y":..,"conditioning":[..]} block of a graph document.
struct HypothesisFields {
    std::optional<std::string> x;
    std::optional<std::string> y;
    std::optional<std::vector<std::string>> conditioning;
};
HypothesisFields hypothesis_fields(const json& graph_doc);

// Distributions: {"axes":[{"name":"X","cardinality":3}],"values":[...],"encoding":"float"|"rational"}
using AnyDistribution = std::variant<dist::FloatDistribution, dist::RationalDistribution>;
AnyDistribution distribution_from_json(const json& j);
json distribution_to_json(const dist::FloatDistribution& d);
json distribution_to_json(const dist::RationalDistribution& d);
json distribution_to_json(const AnyDistribution& d);

/// Two-axis matrix from CSV, one line per row of the first axis. Cells may be
/// decimal or "p/q"; any "p/q" cell makes the whole matrix rational.
AnyDistribution distribution_from_csv(std::string_view text, const std::string& row_axis = "X",
                                      const std::string& col_axis = "Y");

nnrank::MatrixXd to_matrix(const AnyDistribution& d);

json factorization_to_json(const nnrank::NNFactorization& f);
nnrank::NNFactorization factorization_from_json(const json& j);

json psd_factorization_to_json(const psd::PsdFactorization& f);
psd::PsdFactorization psd_factorization_from_json(const json& j);

json rank_bounds_to_json(const nnrank::RankBounds& b);
json psd_bounds_to_json(const psd::PsdRankBounds& b);
json verdict_to_json(const witness::WitnessVerdict& v);
json oracle_report_to_json(const witness::OracleReport& r);
json complexity_to_json(const protocol::ComplexityReport& r);
json tradeoff_to_json(const protocol::TradeoffReport& r);
json latent_to_json(const nnrank::LatentDecomposition& d);

/// "ex_x_plus,ex_x_minus,feasible" over an N×N grid of targets in [-1,1]².
std::string oracle_grid_csv(int grid, double tol, int response_grid_steps = 256);

// Protocols: {"type":"seed"|"message"|"hybrid","seed":[...],"encoders":{...},"encoding":...}
using AnyProtocol = std::variant<protocol::SeedProtocol<double>, protocol::MessageProtocol<double>,
                                 protocol::HybridProtocol<double>, protocol::SeedProtocol<Rational>,
                                 protocol::MessageProtocol<Rational>, protocol::HybridProtocol<Rational>>;
AnyProtocol protocol_from_json(const json& j);
std::string protocol_type(const AnyProtocol& p);
AnyDistribution simulate(const AnyProtocol& p);
nnrank::NNFactorization structural_factorization(const AnyProtocol& p);

}  // namespace rankwitness::io
