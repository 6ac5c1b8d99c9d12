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

// qroute: routing workflow on a synthetic noisy device.
//   plan -> run -> calibrate -> route -> verify / tomo
//
// Exit codes: 0 success, 2 usage, 3 validation, 4 data format.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "qroute/qroute.hpp"
#include "qroute/verify.hpp"

namespace {

using namespace qroute;

constexpr int kExitValidation = 3;
constexpr int kExitDataFormat = 4;

/// Relative paths resolve under $QROUTE_WORKSPACE when it is set.
std::string resolve_path(const std::string& path) {
  if (path.empty() || std::filesystem::path(path).is_absolute()) return path;
  const char* root = std::getenv("QROUTE_WORKSPACE");
  if (root == nullptr || *root == '\0') return path;
  return (std::filesystem::path(root) / path).string();
}

/// --device accepts a JSON file or a synthesis spec:
///   synth:line:<n>:<seed>   |   synth:boeblingen:<seed>
DeviceModel load_device(const std::string& spec) {
  if (spec.rfind("synth:", 0) == 0) {
    std::vector<std::string> parts;
    std::string token;
    std::istringstream in(spec);
    while (std::getline(in, token, ':')) parts.push_back(token);
    try {
      if (parts.size() == 4 && parts[1] == "line")
        return make_line(std::stoi(parts[2]), std::stoull(parts[3]));
      if (parts.size() == 3 && parts[1] == "boeblingen")
        return make_boeblingen_like(std::stoull(parts[2]));
    } catch (const std::exception& e) {
      throw ValidationError(std::string("bad device spec: ") + e.what());
    }
    throw ValidationError("unknown device spec '" + spec +
                          "' (use synth:line:<n>:<seed> or synth:boeblingen:<seed>)");
  }
  return device_from_json(parse_json(read_file(resolve_path(spec)), "device file"));
}

std::set<Gate> parse_gate_set(const std::string& csv) {
  std::set<Gate> gates;
  std::istringstream in(csv);
  std::string token;
  while (std::getline(in, token, ',')) {
    if (token == "cnot") {
      gates.insert(Gate::Cnot12);
      gates.insert(Gate::Cnot21);
    } else if (!token.empty()) {
      gates.insert(gate_from_string(token));
    }
  }
  return gates;
}

Program load_program(const std::string& path) {
  const std::string text = read_file(resolve_path(path));
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json")
    return program_from_json(parse_json(text, "program file"));
  return parse_program_text(text);
}

std::pair<int, int> parse_bits(const std::string& bits) {
  if (bits.size() != 2 || (bits[0] != '0' && bits[0] != '1') ||
      (bits[1] != '0' && bits[1] != '1'))
    throw ValidationError("--bits wants two characters like 10 (b0 then b1)");
  return {bits[0] - '0', bits[1] - '0'};
}

struct GlobalOptions {
  std::string device;
  std::uint64_t seed = 1;
  std::uint64_t shots = kDefaultShots;
  std::string out;
  std::string emit_device;
};

void maybe_emit_device(const GlobalOptions& opts, const DeviceModel& device) {
  if (opts.emit_device.empty()) return;
  write_file(resolve_path(opts.emit_device), device_to_json(device).dump(2) + "\n");
}

int cmd_plan(const GlobalOptions& opts, const std::string& gates_csv) {
  const DeviceModel device = load_device(opts.device);
  const std::set<Gate> gates = parse_gate_set(gates_csv);
  const CharacterizationPlan plan = build_plan(device, gates, opts.shots);
  maybe_emit_device(opts, device);
  if (!opts.out.empty())
    write_jsonl(resolve_path(opts.out), plan.experiments, experiment_to_json);
  std::cout << "device: " << device.name << "\n"
            << "circuits: " << plan.circuits() << "\n"
            << "native gates: " << plan.gate_count() << "\n"
            << "total shots: " << plan.total_shots() << "\n";
  return 0;
}

int cmd_run(const GlobalOptions& opts, const std::string& plan_path,
            const std::string& program_path) {
  const DeviceModel device = load_device(opts.device);
  maybe_emit_device(opts, device);
  if (plan_path.empty() == program_path.empty())
    throw ValidationError("run wants exactly one of --plan or --program");

  if (!plan_path.empty()) {
    const auto experiments = read_jsonl<Experiment>(
        resolve_path(plan_path), experiment_from_json, "plan");
    CharacterizationPlan plan;
    plan.experiments = experiments;
    const auto results = run_plan(device, plan, opts.seed);
    if (opts.out.empty())
      throw ValidationError("run --plan wants --out for the results file");
    write_jsonl(resolve_path(opts.out), results, result_to_json);
    std::cout << "ran " << results.size() << " circuits ("
              << plan.total_shots() << " shots)\n";
    return 0;
  }

  const Program program = load_program(program_path);
  const ShotCounts counts = run_shots(device, program, opts.shots, opts.seed);
  Json record = counts_to_json(counts);
  record["program"] = program_path;
  record["seed"] = opts.seed;
  const std::string line = record.dump() + "\n";
  if (opts.out.empty())
    std::cout << line;
  else
    write_file(resolve_path(opts.out), line);
  return 0;
}

int cmd_calibrate(const GlobalOptions& opts, const std::string& results_path,
                  const std::string& timestamp) {
  const DeviceModel device = load_device(opts.device);
  const auto results = read_jsonl<ExperimentResult>(
      resolve_path(results_path), result_from_json, "results");
  const CalibrationSet calib = calibrate(device, results, timestamp);
  const std::string text = calibration_to_json(calib).dump(2) + "\n";
  if (opts.out.empty())
    std::cout << text;
  else
    write_file(resolve_path(opts.out), text);
  std::cerr << "calibrated " << calib.tables.size() << " tables and "
            << calib.confusion.n_qubits() << " readout channels\n";
  return 0;
}

int cmd_route(const GlobalOptions& opts, const std::string& calib_path,
              int src, int dst, const std::string& bits,
              const std::string& mode) {
  const DeviceModel device = load_device(opts.device);
  const CalibrationSet calib = calibration_from_json(
      parse_json(read_file(resolve_path(calib_path)), "calibration file"));
  RouteRequest request;
  request.source = src;
  request.destination = dst;
  std::tie(request.b0, request.b1) = parse_bits(bits);
  if (mode == "state-dependent")
    request.mode = WeightMode::StateDependent;
  else if (mode == "state-independent")
    request.mode = WeightMode::StateIndependent;
  else
    throw ValidationError("--mode wants state-dependent or state-independent");

  Route route = shortest_route(device, calib, request);
  route.predicted_fidelity = predict_fidelity(
      calib, route, request.b0, request.b1, static_cast<int>(route.pairs.size()));
  const std::string text = route_to_json(route).dump(2) + "\n";
  std::cout << text;
  if (!opts.out.empty()) write_file(resolve_path(opts.out), text);
  return 0;
}

int cmd_verify(const GlobalOptions& opts, const std::string& calib_path,
               const std::string& route_path, const std::string& bits,
               int max_hops, bool all_inputs, bool raw_readout) {
  const DeviceModel device = load_device(opts.device);
  const CalibrationSet calib = calibration_from_json(
      parse_json(read_file(resolve_path(calib_path)), "calibration file"));
  const Route route = route_from_json(
      parse_json(read_file(resolve_path(route_path)), "route file"));
  if (max_hops <= 0) max_hops = static_cast<int>(route.pairs.size());

  std::vector<VerifyPoint> series;
  if (all_inputs) {
    for (int b0 = 0; b0 < 2; ++b0)
      for (int b1 = 0; b1 < 2; ++b1) {
        const auto part =
            verify_route(device, calib, route.path, b0, b1, max_hops,
                         opts.shots, mix_seed(opts.seed, static_cast<std::uint64_t>(2 * b0 + b1)),
                         !raw_readout);
        series.insert(series.end(), part.begin(), part.end());
      }
  } else {
    const auto [b0, b1] = parse_bits(bits);
    series = verify_route(device, calib, route.path, b0, b1, max_hops,
                          opts.shots, opts.seed, !raw_readout);
  }
  const std::string csv = verify_report_csv(series);
  if (opts.out.empty())
    std::cout << csv;
  else
    write_file(resolve_path(opts.out), csv);
  return 0;
}

int cmd_tomo(const GlobalOptions& opts, const std::string& program_path,
             const std::string& qubits_csv, bool raw_readout,
             const std::string& counts_out, const std::string& state_out) {
  const DeviceModel device = load_device(opts.device);
  Program program = load_program(program_path);
  // The tomography rotations replace the final measurement.
  std::erase_if(program.instructions, [](const Instruction& ins) {
    return ins.kind == Instruction::Kind::MeasureAll;
  });
  const ExactResult exact = run_exact(device, program);

  std::vector<int> targets;
  if (qubits_csv.empty()) {
    targets = exact.support;
  } else {
    std::istringstream in(qubits_csv);
    std::string token;
    while (std::getline(in, token, ',')) targets.push_back(std::stoi(token));
  }
  std::map<int, int> support_local;
  for (std::size_t i = 0; i < exact.support.size(); ++i)
    support_local[exact.support[i]] = static_cast<int>(i);
  std::vector<int> keep;
  keep.reserve(targets.size());
  for (int q : targets) {
    if (!support_local.count(q))
      throw ValidationError("tomography register " + std::to_string(q) +
                            " is outside the program support");
    keep.push_back(support_local.at(q));
  }
  const DensityMatrix rho = static_cast<int>(keep.size()) == exact.state.n_qubits()
                                ? exact.state
                                : partial_trace(exact.state, keep);

  std::vector<int> sorted_targets = targets;
  std::sort(sorted_targets.begin(), sorted_targets.end());
  const ConfusionModel readout = device.readout.scope() ==
                                         ConfusionModel::Scope::PerQubit
                                     ? device.readout.restrict(sorted_targets)
                                     : device.readout;
  const auto counts = sample_tomography(rho, opts.shots, opts.seed, &readout);
  const auto expectations = expectations_from_counts(
      rho.n_qubits(), counts, raw_readout ? nullptr : &readout);
  const ReconstructedState recon =
      reconstruct(rho.n_qubits(), expectations, opts.shots);

  if (!counts_out.empty()) {
    std::vector<TomographyRecord> records;
    for (const auto& [setting, c] : counts)
      records.push_back(TomographyRecord{setting, c});
    write_jsonl(resolve_path(counts_out), records, tomography_record_to_json);
  }
  const std::string state_text = reconstruction_to_json(recon).dump(2) + "\n";
  if (!state_out.empty()) write_file(resolve_path(state_out), state_text);

  // Fidelity against the noiseless program output on the same registers.
  DeviceModel noiseless = device;
  noiseless.ground_truth.clear();
  noiseless.swap_via_cnots = false;
  const ExactResult ideal_full = run_exact(noiseless, program);
  const DensityMatrix ideal_reduced =
      static_cast<int>(keep.size()) == ideal_full.state.n_qubits()
          ? ideal_full.state
          : partial_trace(ideal_full.state, keep);
  const Eigen::VectorXd diag = ideal_reduced.diagonal();
  Eigen::Index ideal_index = 0;
  diag.maxCoeff(&ideal_index);
  const PureState ideal = PureState::basis(
      rho.n_qubits(), static_cast<std::uint64_t>(ideal_index));

  Json report{{"registers", sorted_targets},
              {"settings", counts.size()},
              {"shots_per_setting", opts.shots},
              {"clipped_mass", recon.clipped_mass},
              {"fidelity_vs_ideal", tomographic_fidelity(ideal, recon)}};
  std::cout << report.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"noise-aware routing workflow on a synthetic device"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  GlobalOptions opts;
  app.add_option("--device", opts.device,
                 "device JSON file or synth:line:<n>:<seed> / synth:boeblingen:<seed>")
      ->required();
  app.add_option("--seed", opts.seed, "base RNG seed (default 1)");
  app.add_option("--shots", opts.shots, "shots per circuit (default 8192)");
  app.add_option("--out", opts.out, "output file (default stdout where sensible)");
  app.add_option("--emit-device", opts.emit_device,
                 "also write the (possibly synthesized) device JSON here");

  auto* plan = app.add_subcommand("plan", "emit a characterization plan");
  std::string gates_csv = "cnot,swap";
  plan->add_option("--gates", gates_csv, "comma list: cnot, swap, ident");

  auto* run = app.add_subcommand("run", "execute a plan or a single program");
  std::string plan_path, program_path;
  run->add_option("--plan", plan_path, "plan JSONL to execute");
  run->add_option("--program", program_path, "program file (.txt or .json)");

  auto* calibrate_cmd =
      app.add_subcommand("calibrate", "fit readout and gate tables from results");
  std::string results_path, timestamp;
  calibrate_cmd->add_option("--results", results_path, "results JSONL")->required();
  calibrate_cmd->add_option("--timestamp", timestamp,
                            "metadata stamp recorded in the calibration");

  auto* route_cmd = app.add_subcommand("route", "select a minimal-cost route");
  std::string calib_path, bits = "00", mode = "state-independent";
  int src = 0, dst = 0;
  route_cmd->add_option("--calib", calib_path, "calibration JSON")->required();
  route_cmd->add_option("--src", src, "source register")->required();
  route_cmd->add_option("--dst", dst, "destination register")->required();
  route_cmd->add_option("--bits", bits, "routed bits b0b1 (default 00)");
  route_cmd->add_option("--mode", mode,
                        "state-independent (default) or state-dependent");

  auto* verify_cmd = app.add_subcommand(
      "verify", "compare predicted and tomographic fidelity along a route");
  std::string v_calib, v_route, v_bits = "00";
  int max_hops = 0;
  bool all_inputs = false, raw_readout = false;
  verify_cmd->add_option("--calib", v_calib, "calibration JSON")->required();
  verify_cmd->add_option("--route", v_route, "route JSON from `route`")->required();
  verify_cmd->add_option("--bits", v_bits, "routed bits b0b1");
  verify_cmd->add_option("--max-hops", max_hops,
                         "series length (default: route length)");
  verify_cmd->add_flag("--all-inputs", all_inputs,
                       "emit series for all four inputs 00 01 10 11");
  verify_cmd->add_flag("--raw-readout", raw_readout,
                       "skip confusion mitigation in tomography");

  auto* tomo_cmd =
      app.add_subcommand("tomo", "tomographic reconstruction of a program output");
  std::string t_program, t_qubits, t_counts_out, t_state_out;
  bool t_raw = false;
  tomo_cmd->add_option("--program", t_program, "program file")->required();
  tomo_cmd->add_option("--qubits", t_qubits,
                       "comma list of registers (default: program support)");
  tomo_cmd->add_option("--counts-out", t_counts_out, "per-setting counts JSONL");
  tomo_cmd->add_option("--state-out", t_state_out, "reconstructed state JSON");
  tomo_cmd->add_flag("--raw-readout", t_raw,
                     "skip confusion mitigation in expectations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (plan->parsed()) return cmd_plan(opts, gates_csv);
    if (run->parsed()) return cmd_run(opts, plan_path, program_path);
    if (calibrate_cmd->parsed())
      return cmd_calibrate(opts, results_path, timestamp);
    if (route_cmd->parsed())
      return cmd_route(opts, calib_path, src, dst, bits, mode);
    if (verify_cmd->parsed())
      return cmd_verify(opts, v_calib, v_route, v_bits, max_hops, all_inputs,
                        raw_readout);
    if (tomo_cmd->parsed())
      return cmd_tomo(opts, t_program, t_qubits, t_raw, t_counts_out,
                      t_state_out);
  } catch (const DataFormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDataFormat;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
