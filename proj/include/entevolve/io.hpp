#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"

#include "entevolve/entanglement.hpp"
#include "entevolve/network.hpp"
#include "entevolve/quantum.hpp"
#include "entevolve/report.hpp"
#include "entevolve/tensor.hpp"

namespace entevolve {

// Object keys keep insertion order so identical inputs print identical bytes.
using Json = nlohmann::ordered_json;

// Schema violations raise Error(ErrorCode::Format); graph validation errors
// keep their own codes.
//
// Network file:
//   { "nodes": [ { "id": int, "kind": "dense"|"delta"|"cup"|"cap",
//                  "dims": [int...], "variance": ["up"|"down"...],
//                  "data": [[re, im]...],          (dense only)
//                  "labels": [string|null...] } ], (optional)
//     "edges": [ [[id, leg], [id, leg]]... ],
//     "open":  [ [id, leg]... ] }
Json network_to_json(const TensorNetworkGraph& g);
TensorNetworkGraph network_from_json(const Json& j);

// { "dims": [...], "variance": [...], "data": [[re, im]...] }
Json tensor_to_json(const Tensor& t);
Tensor tensor_from_json(const Json& j);

// { "dims": [dA, dB], "amplitudes": [[re, im]...] }
Json state_to_json(const PureState& psi);
PureState state_from_json(const Json& j);

// { "dims": [d_out, d_in], "kraus": [ matrix... ] }, matrix = rows of [re, im]
Json channel_to_json(const KrausChannel& c);
KrausChannel channel_from_json(const Json& j);

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

// Single-node networks for states and channels (channel_tensor layout).
TensorNetworkGraph state_to_network(const PureState& psi);
TensorNetworkGraph channel_to_network(const KrausChannel& c);

Json rewrite_event_to_json(const RewriteEvent& ev);
Json measure_to_json(const MeasureValue& m);

// { "check", "mode", "seed", "trials", "max_residual", "failures", "pass" }
Json report_to_json(const VerificationReport& r);
// One row per trial: trial,residual,lhs,rhs,pass,detail
std::string report_to_csv(const VerificationReport& r);

Json parse_json(const std::string& text);
Json read_json_file(const std::string& path);

}  // namespace entevolve
