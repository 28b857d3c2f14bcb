#include "entevolve/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace entevolve {

namespace {

[[noreturn]] void format_error(const std::string& what) {
  throw Error(ErrorCode::Format, what);
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    format_error(std::string("missing field \"") + key + "\"");
  }
  return j.at(key);
}

std::size_t as_size(const Json& j, const char* what) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    format_error(std::string(what) + " must be a non-negative integer");
  }
  return j.get<std::size_t>();
}

Json complex_to_json(complex z) { return Json::array({z.real(), z.imag()}); }

complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    format_error("complex entries are [re, im] pairs");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<complex> complex_list(const Json& j) {
  if (!j.is_array()) format_error("expected an array of [re, im] pairs");
  std::vector<complex> out;
  out.reserve(j.size());
  for (const auto& z : j) out.push_back(complex_from_json(z));
  return out;
}

Variance variance_from_json(const Json& j) {
  if (j == "up") return Variance::Up;
  if (j == "down") return Variance::Down;
  format_error("variance must be \"up\" or \"down\"");
}

std::string variance_name(Variance v) { return v == Variance::Up ? "up" : "down"; }

NodeKind kind_from_json(const Json& j) {
  for (auto k : {NodeKind::Dense, NodeKind::Delta, NodeKind::Cup, NodeKind::Cap}) {
    if (j == to_string(k)) return k;
  }
  format_error("node kind must be dense, delta, cup or cap");
}

LegRef leg_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer()) {
    format_error("leg references are [node-id, leg] pairs");
  }
  return LegRef{j[0].get<NodeId>(), as_size(j[1], "leg index")};
}

Json leg_to_json(LegRef l) { return Json::array({l.node, l.leg}); }

std::vector<IndexSpec> specs_from_json(const Json& node) {
  const Json& dims = field(node, "dims");
  const Json& var = field(node, "variance");
  if (!dims.is_array() || !var.is_array() || dims.size() != var.size()) {
    format_error("dims and variance must be arrays of equal length");
  }
  std::vector<IndexSpec> specs;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    specs.emplace_back(as_size(dims[i], "dimension"), variance_from_json(var[i]));
  }
  if (node.contains("labels")) {
    const Json& labels = node.at("labels");
    if (!labels.is_array() || labels.size() != specs.size()) {
      format_error("labels must match the index count");
    }
    for (std::size_t i = 0; i < specs.size(); ++i) {
      if (labels[i].is_string()) specs[i].label = labels[i].get<std::string>();
      else if (!labels[i].is_null()) format_error("labels are strings or null");
    }
  }
  return specs;
}

void specs_to_json(const std::vector<IndexSpec>& specs, Json& out) {
  Json dims = Json::array();
  Json var = Json::array();
  bool labelled = false;
  for (const auto& s : specs) {
    dims.push_back(s.dim);
    var.push_back(variance_name(s.variance));
    labelled = labelled || s.label.has_value();
  }
  out["dims"] = std::move(dims);
  out["variance"] = std::move(var);
  if (labelled) {
    Json labels = Json::array();
    for (const auto& s : specs) labels.push_back(s.label ? Json(*s.label) : Json(nullptr));
    out["labels"] = std::move(labels);
  }
}

}  // namespace

Json tensor_to_json(const Tensor& t) {
  Json out = Json::object();
  specs_to_json(t.indices(), out);
  Json data = Json::array();
  for (const auto& z : t.data()) data.push_back(complex_to_json(z));
  out["data"] = std::move(data);
  return out;
}

Tensor tensor_from_json(const Json& j) {
  return Tensor(specs_from_json(j), complex_list(field(j, "data")));
}

Json network_to_json(const TensorNetworkGraph& g) {
  Json nodes = Json::array();
  for (const auto& n : g.nodes()) {
    Json node = Json::object();
    node["id"] = n.id;
    node["kind"] = std::string(to_string(n.kind));
    specs_to_json(n.tensor.indices(), node);
    if (n.kind == NodeKind::Dense) {
      Json data = Json::array();
      for (const auto& z : n.tensor.data()) data.push_back(complex_to_json(z));
      node["data"] = std::move(data);
    }
    nodes.push_back(std::move(node));
  }
  Json edges = Json::array();
  for (const auto& e : g.edges()) edges.push_back(Json::array({leg_to_json(e.a), leg_to_json(e.b)}));
  Json open = Json::array();
  for (const auto& l : g.open_legs()) open.push_back(leg_to_json(l));

  Json out = Json::object();
  out["nodes"] = std::move(nodes);
  out["edges"] = std::move(edges);
  out["open"] = std::move(open);
  return out;
}

TensorNetworkGraph network_from_json(const Json& j) {
  const Json& nodes_json = field(j, "nodes");
  if (!nodes_json.is_array()) format_error("\"nodes\" must be an array");
  std::vector<NetworkNode> nodes;
  for (const auto& nj : nodes_json) {
    const Json& id = field(nj, "id");
    if (!id.is_number_integer()) format_error("node id must be an integer");
    const NodeKind kind = kind_from_json(field(nj, "kind"));
    std::vector<IndexSpec> specs = specs_from_json(nj);
    NetworkNode node;
    node.id = id.get<NodeId>();
    node.kind = kind;
    if (kind == NodeKind::Dense) {
      node.tensor = Tensor(std::move(specs), complex_list(field(nj, "data")));
    } else {
      if (specs.size() != 2 || specs[0].dim != specs[1].dim) {
        format_error("wire nodes have two legs of equal dimension");
      }
      const std::size_t d = specs[0].dim;
      if (d == 0) throw Error(ErrorCode::InvalidDimension, "wire dimension is 0");
      Tensor t = kind == NodeKind::Delta ? make_delta(d)
                 : kind == NodeKind::Cup ? make_cup(d)
                                         : make_cap(d);
      if (t.index(0).variance != specs[0].variance ||
          t.index(1).variance != specs[1].variance) {
        format_error("variance of node " + std::to_string(node.id) +
                     " does not match its kind");
      }
      for (std::size_t i = 0; i < 2; ++i) t.set_label(i, specs[i].label);
      node.tensor = std::move(t);
    }
    nodes.push_back(std::move(node));
  }

  const Json& edges_json = field(j, "edges");
  if (!edges_json.is_array()) format_error("\"edges\" must be an array");
  std::vector<Edge> edges;
  for (const auto& ej : edges_json) {
    if (!ej.is_array() || ej.size() != 2) format_error("edges are pairs of legs");
    edges.push_back(Edge{leg_from_json(ej[0]), leg_from_json(ej[1])});
  }
  const Json& open_json = field(j, "open");
  if (!open_json.is_array()) format_error("\"open\" must be an array");
  std::vector<LegRef> open;
  for (const auto& oj : open_json) open.push_back(leg_from_json(oj));
  return TensorNetworkGraph::build(std::move(nodes), std::move(edges), std::move(open));
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    format_error("matrices are non-empty arrays of rows");
  }
  const std::size_t cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto row = complex_list(j[i]);
    if (row.size() != cols) format_error("matrix rows differ in length");
    for (std::size_t k = 0; k < cols; ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k];
    }
  }
  return m;
}

Json state_to_json(const PureState& psi) {
  Json out = Json::object();
  out["dims"] = Json::array({psi.dims().a, psi.dims().b});
  Json amps = Json::array();
  for (Eigen::Index i = 0; i < psi.amplitudes().size(); ++i) {
    amps.push_back(complex_to_json(psi.amplitudes()(i)));
  }
  out["amplitudes"] = std::move(amps);
  return out;
}

PureState state_from_json(const Json& j) {
  const Json& dims = field(j, "dims");
  if (!dims.is_array() || dims.size() != 2) format_error("state dims are [dA, dB]");
  const auto amps = complex_list(field(j, "amplitudes"));
  Vector v(static_cast<Eigen::Index>(amps.size()));
  for (std::size_t i = 0; i < amps.size(); ++i) v(static_cast<Eigen::Index>(i)) = amps[i];
  return PureState({as_size(dims[0], "dimension"), as_size(dims[1], "dimension")},
                   std::move(v));
}

Json channel_to_json(const KrausChannel& c) {
  Json out = Json::object();
  out["dims"] = Json::array({c.dim_out(), c.dim_in()});
  Json kraus = Json::array();
  for (const auto& k : c.operators()) kraus.push_back(matrix_to_json(k));
  out["kraus"] = std::move(kraus);
  return out;
}

KrausChannel channel_from_json(const Json& j) {
  const Json& kraus = field(j, "kraus");
  if (!kraus.is_array() || kraus.empty()) format_error("\"kraus\" is a non-empty array");
  std::vector<Matrix> ops;
  for (const auto& k : kraus) ops.push_back(matrix_from_json(k));
  KrausChannel c(std::move(ops));
  if (j.contains("dims")) {
    const Json& dims = j.at("dims");
    if (!dims.is_array() || dims.size() != 2 ||
        as_size(dims[0], "dimension") != c.dim_out() ||
        as_size(dims[1], "dimension") != c.dim_in()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "channel dims do not match its Kraus operators");
    }
  }
  return c;
}

TensorNetworkGraph state_to_network(const PureState& psi) {
  return TensorNetworkGraph::build({NetworkNode::dense(0, state_tensor(psi))}, {},
                                   {{0, 0}, {0, 1}});
}

TensorNetworkGraph channel_to_network(const KrausChannel& c) {
  return TensorNetworkGraph::build({NetworkNode::dense(0, channel_tensor(c))}, {},
                                   {{0, 0}, {0, 1}, {0, 2}, {0, 3}});
}

Json rewrite_event_to_json(const RewriteEvent& ev) {
  auto sig = [](const std::vector<LegSignature>& s) {
    Json out = Json::array();
    for (const auto& l : s) out.push_back(Json::array({l.dim, variance_name(l.variance)}));
    return out;
  };
  Json out = Json::object();
  out["rule"] = ev.rule;
  out["nodes"] = ev.nodes;
  out["edges"] = ev.edges;
  out["before"] = sig(ev.before);
  out["after"] = sig(ev.after);
  return out;
}

Json measure_to_json(const MeasureValue& m) {
  Json out = Json::object();
  out["measure"] = m.measure.kind == MeasureKind::GConcurrence ? "g-concurrence"
                                                               : "concurrence";
  out["d"] = m.measure.d;
  out["value"] = m.value;
  out["exactness"] = m.exactness == Exactness::Exact ? "exact" : "upper-bound";
  if (m.budget) out["budget"] = *m.budget;
  return out;
}

namespace {

Json record_to_json(const TrialRecord& r) {
  Json out = Json::object();
  out["trial"] = r.trial;
  out["residual"] = r.residual;
  out["lhs"] = r.lhs;
  out["rhs"] = r.rhs;
  out["detail"] = r.detail;
  return out;
}

}  // namespace

Json report_to_json(const VerificationReport& r) {
  Json out = Json::object();
  out["check"] = r.check;
  out["mode"] = r.mode;
  out["seed"] = r.seed ? Json(*r.seed) : Json(nullptr);
  out["trials"] = r.trials();
  out["max_residual"] = r.max_residual();
  Json failures = Json::array();
  for (const auto& f : r.failures()) failures.push_back(record_to_json(f));
  out["failures"] = std::move(failures);
  out["pass"] = r.pass();
  return out;
}

std::string report_to_csv(const VerificationReport& r) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "trial,residual,lhs,rhs,pass,detail\n";
  for (const auto& rec : r.records) {
    os << rec.trial << ',' << rec.residual << ',' << rec.lhs << ',' << rec.rhs << ','
       << (rec.pass ? "true" : "false") << ',';
    // Details never contain quotes; commas force quoting.
    if (rec.detail.find(',') != std::string::npos) os << '"' << rec.detail << '"';
    else os << rec.detail;
    os << '\n';
  }
  return os.str();
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    format_error(std::string("malformed JSON: ") + e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) format_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str());
}

}  // namespace entevolve
