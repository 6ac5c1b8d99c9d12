// Copyright 2026 The qroute Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qroute/characterize.hpp"
#include "qroute/router.hpp"
#include "qroute/tomography.hpp"

// File formats. Everything states the bit-order convention: register i is
// bit i of basis indices and character i of outcome keys; the first element
// of a canonical pair is the pair's low bit.

namespace qroute {

using Json = nlohmann::json;

inline Json parse_json(const std::string& text, const std::string& what) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw DataFormatError("malformed JSON in " + what);
  return j;
}

template <typename T>
T get_field(const Json& j, const std::string& key, const std::string& what) {
  if (!j.contains(key))
    throw DataFormatError(what + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw DataFormatError(what + ": field '" + key + "' has the wrong type");
  }
}

// ---------------------------------------------------------------------------
// TransitionTable
// ---------------------------------------------------------------------------

inline constexpr const char* kTableConvention = "k-by-postgate-j";

inline Json table_to_json(const TransitionTable& table,
                          std::pair<int, int> pair) {
  std::vector<double> p;
  p.reserve(16);
  for (int k = 0; k < 4; ++k)
    for (int j = 0; j < 4; ++j) p.push_back(table.p(k, j));
  return Json{{"gate", to_string(table.gate())},
              {"pair", {pair.first, pair.second}},
              {"p", p},
              {"convention", kTableConvention},
              {"amplitudes", BinaryNoiseChannel::kAmplitudeConvention}};
}

inline std::pair<GatePairKey, TransitionTable> table_from_json(const Json& j) {
  const std::string what = "transition table";
  const Gate gate = gate_from_string(get_field<std::string>(j, "gate", what));
  const auto pair = get_field<std::vector<int>>(j, "pair", what);
  if (pair.size() != 2) throw DataFormatError(what + ": pair needs 2 entries");
  if (j.contains("convention") && j.at("convention") != kTableConvention)
    throw DataFormatError(what + ": unsupported convention");
  const auto p = get_field<std::vector<double>>(j, "p", what);
  if (p.size() != 16) throw DataFormatError(what + ": p needs 16 entries");
  Eigen::Matrix4d m;
  for (int k = 0; k < 4; ++k)
    for (int jj = 0; jj < 4; ++jj)
      m(k, jj) = p[static_cast<std::size_t>(4 * k + jj)];
  try {
    return {GatePairKey{gate, pair[0], pair[1]}, TransitionTable(gate, m)};
  } catch (const ValidationError& e) {
    throw DataFormatError(what + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// ConfusionModel
// ---------------------------------------------------------------------------

inline Json confusion_to_json(const ConfusionModel& model) {
  if (model.scope() == ConfusionModel::Scope::PerQubit) {
    std::vector<std::vector<double>> mats;
    for (const auto& m : model.qubit_matrices())
      mats.push_back({m(0, 0), m(0, 1), m(1, 0), m(1, 1)});
    std::vector<int> qubits(static_cast<std::size_t>(model.n_qubits()));
    for (int q = 0; q < model.n_qubits(); ++q)
      qubits[static_cast<std::size_t>(q)] = q;
    return Json{{"scope", "per-qubit"}, {"qubits", qubits}, {"matrices", mats}};
  }
  const auto& m = model.pair_matrix();
  std::vector<double> flat;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) flat.push_back(m(r, c));
  return Json{{"scope", "per-pair"}, {"pair", {0, 1}}, {"matrices", {flat}}};
}

inline ConfusionModel confusion_from_json(const Json& j) {
  const std::string what = "confusion model";
  const auto scope = get_field<std::string>(j, "scope", what);
  const auto mats = get_field<std::vector<std::vector<double>>>(j, "matrices", what);
  try {
    if (scope == "per-qubit") {
      std::vector<Eigen::Matrix2d> out;
      for (const auto& flat : mats) {
        if (flat.size() != 4)
          throw DataFormatError(what + ": per-qubit matrix needs 4 entries");
        Eigen::Matrix2d m;
        m << flat[0], flat[1], flat[2], flat[3];
        out.push_back(m);
      }
      return ConfusionModel::per_qubit(std::move(out));
    }
    if (scope == "per-pair") {
      if (mats.size() != 1 || mats[0].size() != 16)
        throw DataFormatError(what + ": per-pair needs one 16-entry matrix");
      Eigen::Matrix4d m;
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
          m(r, c) = mats[0][static_cast<std::size_t>(4 * r + c)];
      return ConfusionModel::per_pair(m);
    }
  } catch (const ValidationError& e) {
    throw DataFormatError(what + ": " + e.what());
  }
  throw DataFormatError(what + ": unknown scope '" + scope + "'");
}

// ---------------------------------------------------------------------------
// DeviceModel
// ---------------------------------------------------------------------------

inline Json device_to_json(const DeviceModel& device) {
  Json edges = Json::array();
  for (const auto& [a, b] : device.edges) edges.push_back({a, b});
  Json tables = Json::array();
  for (const auto& [key, table] : device.ground_truth)
    tables.push_back(table_to_json(table, {key.a, key.b}));
  return Json{{"name", device.name},
              {"n_qubits", device.n_qubits},
              {"bit_order", "register i is bit i (register 0 least significant)"},
              {"edges", edges},
              {"tables", tables},
              {"readout", confusion_to_json(device.readout)},
              {"swap_via_cnots", device.swap_via_cnots}};
}

inline DeviceModel device_from_json(const Json& j) {
  const std::string what = "device model";
  DeviceModel device;
  device.name = get_field<std::string>(j, "name", what);
  device.n_qubits = get_field<int>(j, "n_qubits", what);
  for (const auto& e : get_field<std::vector<std::vector<int>>>(j, "edges", what)) {
    if (e.size() != 2) throw DataFormatError(what + ": edge needs 2 registers");
    device.edges.emplace_back(e[0], e[1]);
  }
  if (!j.contains("tables") || !j.at("tables").is_array())
    throw DataFormatError(what + ": missing tables array");
  for (const auto& t : j.at("tables")) {
    auto [key, table] = table_from_json(t);
    if (!device.ground_truth.emplace(key, table).second)
      throw DataFormatError(what + ": duplicate table for " +
                            to_string(key.gate));
  }
  if (!j.contains("readout")) throw DataFormatError(what + ": missing readout");
  device.readout = confusion_from_json(j.at("readout"));
  device.swap_via_cnots = j.value("swap_via_cnots", false);
  try {
    device.validate();
  } catch (const ValidationError& e) {
    throw DataFormatError(what + ": " + e.what());
  }
  return device;
}

// ---------------------------------------------------------------------------
// ShotCounts
// ---------------------------------------------------------------------------

inline Json counts_to_json(const ShotCounts& counts) {
  Json c = Json::object();
  for (const auto& [bits, n] : counts.counts) c[bits] = n;
  return Json{{"shots", counts.total_shots}, {"counts", c}};
}

inline ShotCounts counts_from_json(const Json& j) {
  const std::string what = "shot counts";
  ShotCounts out;
  out.total_shots = get_field<std::uint64_t>(j, "shots", what);
  if (!j.contains("counts") || !j.at("counts").is_object())
    throw DataFormatError(what + ": missing counts object");
  for (const auto& [bits, n] : j.at("counts").items())
    out.counts[bits] = n.get<std::uint64_t>();
  try {
    out.validate();
  } catch (const ValidationError& e) {
    throw DataFormatError(what + ": " + e.what());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Characterization plan and results (JSON lines)
// ---------------------------------------------------------------------------

inline Json experiment_to_json(const Experiment& e) {
  return Json{{"gate", to_string(e.gate)},
              {"pair", e.pair},
              {"prep", e.prep},
              {"shots", e.shots}};
}

inline Experiment experiment_from_json(const Json& j) {
  const std::string what = "experiment record";
  Experiment e;
  e.gate = gate_from_string(get_field<std::string>(j, "gate", what));
  e.pair = get_field<std::vector<int>>(j, "pair", what);
  e.prep = get_field<int>(j, "prep", what);
  e.shots = get_field<std::uint64_t>(j, "shots", what);
  const std::size_t want = e.gate == Gate::Meas ? 1 : 2;
  if (e.pair.size() != want)
    throw DataFormatError(what + ": pair arity does not match gate");
  const int max_prep = e.gate == Gate::Meas ? 2 : 4;
  if (e.prep < 0 || e.prep >= max_prep)
    throw DataFormatError(what + ": preparation out of range");
  return e;
}

inline Json result_to_json(const ExperimentResult& r) {
  Json j = experiment_to_json(r.experiment);
  j["counts"] = counts_to_json(r.counts)["counts"];
  return j;
}

inline ExperimentResult result_from_json(const Json& j) {
  ExperimentResult r;
  r.experiment = experiment_from_json(j);
  r.counts = counts_from_json(
      Json{{"shots", r.experiment.shots}, {"counts", j.value("counts", Json::object())}});
  return r;
}

template <typename T, typename ToJson>
void write_jsonl(const std::string& path, const std::vector<T>& records,
                 ToJson to_json) {
  std::ofstream out(path);
  if (!out) throw DataFormatError("cannot open for writing: " + path);
  for (const auto& r : records) out << to_json(r).dump() << "\n";
}

template <typename T, typename FromJson>
std::vector<T> read_jsonl(const std::string& path, FromJson from_json,
                          const std::string& what) {
  std::ifstream in(path);
  if (!in) throw DataFormatError("cannot open: " + path);
  std::vector<T> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    records.push_back(
        from_json(parse_json(line, what + " line " + std::to_string(lineno))));
  }
  return records;
}

// ---------------------------------------------------------------------------
// CalibrationSet
// ---------------------------------------------------------------------------

inline Json calibration_to_json(const CalibrationSet& calib) {
  Json tables = Json::array();
  for (const auto& [key, table] : calib.tables)
    tables.push_back(table_to_json(table, {key.a, key.b}));
  return Json{{"device", calib.device_id},
              {"timestamp", calib.timestamp},
              {"confusion", confusion_to_json(calib.confusion)},
              {"tables", tables}};
}

inline CalibrationSet calibration_from_json(const Json& j) {
  const std::string what = "calibration set";
  CalibrationSet calib;
  calib.device_id = get_field<std::string>(j, "device", what);
  calib.timestamp = j.value("timestamp", "");
  if (!j.contains("confusion"))
    throw DataFormatError(what + ": missing confusion");
  calib.confusion = confusion_from_json(j.at("confusion"));
  if (!j.contains("tables") || !j.at("tables").is_array())
    throw DataFormatError(what + ": missing tables array");
  for (const auto& t : j.at("tables")) {
    auto [key, table] = table_from_json(t);
    calib.tables.emplace(key, table);
  }
  return calib;
}

// ---------------------------------------------------------------------------
// Program (JSON and one-instruction-per-line text)
// ---------------------------------------------------------------------------

inline Json program_to_json(const Program& program) {
  Json list = Json::array();
  for (const auto& ins : program.instructions) {
    switch (ins.kind) {
      case Instruction::Kind::Prepare:
        list.push_back({{"op", "prepare"}, {"qubit", ins.qubit}, {"bit", ins.bit}});
        break;
      case Instruction::Kind::ApplyGate:
        list.push_back(
            {{"op", to_string(ins.gate)}, {"pair", {ins.a, ins.b}}});
        break;
      case Instruction::Kind::Barrier:
        list.push_back({{"op", "barrier"}});
        break;
      case Instruction::Kind::MeasureAll:
        list.push_back({{"op", "measure"}});
        break;
    }
  }
  return Json{{"instructions", list}};
}

inline Program program_from_json(const Json& j) {
  const std::string what = "program";
  if (!j.contains("instructions") || !j.at("instructions").is_array())
    throw DataFormatError(what + ": missing instructions array");
  Program program;
  for (const auto& item : j.at("instructions")) {
    const auto op = get_field<std::string>(item, "op", what);
    if (op == "prepare") {
      program.instructions.push_back(Instruction::prepare(
          get_field<int>(item, "qubit", what), get_field<int>(item, "bit", what)));
    } else if (op == "barrier") {
      program.instructions.push_back(Instruction::barrier());
    } else if (op == "measure") {
      program.instructions.push_back(Instruction::measure_all());
    } else {
      const Gate gate = gate_from_string(op);
      const auto pair = get_field<std::vector<int>>(item, "pair", what);
      if (pair.size() != 2)
        throw DataFormatError(what + ": gate pair needs 2 registers");
      Instruction ins;
      ins.kind = Instruction::Kind::ApplyGate;
      ins.gate = gate;
      ins.a = pair[0];
      ins.b = pair[1];
      program.instructions.push_back(ins);
    }
  }
  return program;
}

/// Plain-text program format, one instruction per line:
///   prepare q0 1
///   cnot q0 q1     (control first)
///   swap q1 q2
///   ident q1 q2
///   barrier
///   measure
inline Program parse_program_text(const std::string& text) {
  Program program;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  auto parse_qubit = [&](const std::string& token) {
    if (token.size() < 2 || token[0] != 'q')
      throw DataFormatError("program line " + std::to_string(lineno) +
                            ": expected register like q0, got '" + token + "'");
    try {
      return std::stoi(token.substr(1));
    } catch (const std::exception&) {
      throw DataFormatError("program line " + std::to_string(lineno) +
                            ": bad register '" + token + "'");
    }
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string op;
    if (!(ls >> op) || op.empty() || op[0] == '#') continue;
    if (op == "prepare") {
      std::string q;
      int bit = -1;
      if (!(ls >> q >> bit) || (bit != 0 && bit != 1))
        throw DataFormatError("program line " + std::to_string(lineno) +
                              ": prepare needs a register and a bit");
      program.instructions.push_back(Instruction::prepare(parse_qubit(q), bit));
    } else if (op == "cnot") {
      std::string c, t;
      if (!(ls >> c >> t))
        throw DataFormatError("program line " + std::to_string(lineno) +
                              ": cnot needs control and target");
      program.instructions.push_back(
          Instruction::cnot(parse_qubit(c), parse_qubit(t)));
    } else if (op == "swap" || op == "ident") {
      std::string x, y;
      if (!(ls >> x >> y))
        throw DataFormatError("program line " + std::to_string(lineno) + ": " +
                              op + " needs two registers");
      program.instructions.push_back(op == "swap"
                                         ? Instruction::swap(parse_qubit(x),
                                                             parse_qubit(y))
                                         : Instruction::ident(parse_qubit(x),
                                                              parse_qubit(y)));
    } else if (op == "barrier") {
      program.instructions.push_back(Instruction::barrier());
    } else if (op == "measure") {
      program.instructions.push_back(Instruction::measure_all());
    } else {
      throw DataFormatError("program line " + std::to_string(lineno) +
                            ": unknown instruction '" + op + "'");
    }
  }
  return program;
}

// ---------------------------------------------------------------------------
// Route
// ---------------------------------------------------------------------------

inline Json route_to_json(const Route& route) {
  Json per_hop = Json::array();
  for (const auto& hop : route.per_hop)
    per_hop.push_back({{"pair", {hop.pair.first, hop.pair.second}},
                       {"weight", hop.weight},
                       {"success", hop.success}});
  Json pairs = Json::array();
  for (const auto& [x, y] : route.pairs) pairs.push_back({x, y});
  return Json{{"path", route.path},
              {"pairs", pairs},
              {"predicted_fidelity", route.predicted_fidelity},
              {"per_hop", per_hop}};
}

inline Route route_from_json(const Json& j) {
  const std::string what = "route";
  Route route;
  route.path = get_field<std::vector<int>>(j, "path", what);
  for (const auto& p : get_field<std::vector<std::vector<int>>>(j, "pairs", what)) {
    if (p.size() != 2) throw DataFormatError(what + ": pair needs 2 registers");
    route.pairs.emplace_back(p[0], p[1]);
  }
  route.predicted_fidelity = j.value("predicted_fidelity", 0.0);
  if (j.contains("per_hop"))
    for (const auto& h : j.at("per_hop")) {
      HopCost hop;
      const auto p = get_field<std::vector<int>>(h, "pair", what);
      if (p.size() != 2) throw DataFormatError(what + ": hop pair needs 2");
      hop.pair = {p[0], p[1]};
      hop.weight = h.value("weight", 0.0);
      hop.success = h.value("success", 1.0);
      route.per_hop.push_back(hop);
    }
  if (route.path.size() < 2 || route.pairs.size() + 1 != route.path.size())
    throw DataFormatError(what + ": pairs must be path length - 1");
  return route;
}

// ---------------------------------------------------------------------------
// Reconstructed state
// ---------------------------------------------------------------------------

inline Json reconstruction_to_json(const ReconstructedState& recon) {
  Json rows = Json::array();
  const auto& m = recon.rho.matrix();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      rows.push_back({m(r, c).real(), m(r, c).imag()});
  return Json{{"n_qubits", recon.rho.n_qubits()},
              {"rho", rows},
              {"layout", "row-major [re, im] pairs; register 0 least significant"},
              {"diagnostics",
               {{"clipped_mass", recon.clipped_mass},
                {"settings_used", recon.settings_used},
                {"shots_per_setting", recon.shots_per_setting}}}};
}

// ---------------------------------------------------------------------------
// Tomography results (JSON lines)
// ---------------------------------------------------------------------------

struct TomographyRecord {
  std::string setting;
  ShotCounts counts;
};

inline Json tomography_record_to_json(const TomographyRecord& r) {
  Json j = counts_to_json(r.counts);
  j["setting"] = r.setting;
  return j;
}

inline TomographyRecord tomography_record_from_json(const Json& j) {
  TomographyRecord r;
  r.setting = get_field<std::string>(j, "setting", "tomography record");
  r.counts = counts_from_json(j);
  return r;
}

// ---------------------------------------------------------------------------
// Whole-file helpers
// ---------------------------------------------------------------------------

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataFormatError("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataFormatError("cannot open for writing: " + path);
  out << text;
}

}  // namespace qroute
