// Copyright 2026 The qdm Authors
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

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "artifacts.hpp"
#include "qdm/cli/cli.hpp"

namespace qdm::cli {
namespace {

using detail::csv_real;
using detail::JsonWriter;

std::string_view outcome_name(measurement::Outcome o) { return o == measurement::Outcome::up ? "up" : "down"; }

void run_measure(const RunConfig& rc, const MeasureJob& job, std::ostream& out, RunSummary& sum) {
  const auto run = measurement::run_repeated(job.config, job.runs);
  const auto& rec = run.first;
  if (rc.format == Format::csv) {
    out << "run_id,outcome,S2\n";
    for (std::size_t i = 0; i < run.outcomes.size(); ++i)
      out << i << ',' << outcome_name(run.outcomes[i]) << ',' << csv_real(run.s2) << '\n';
  } else {
    const auto& c = job.config;
    JsonWriter w(out);
    w.begin_object();
    w.key("config").begin_object();
    w.key("c_up").value(c.c_up);
    w.key("c_down").value(c.c_down);
    w.key("T_a").value(c.apparatus_temperature);
    w.key("delta_E1").value(c.delta_e1);
    w.key("delta_E2").value(c.delta_e2);
    w.key("phase_mode").value(std::string_view(c.phase_mode == measurement::PhaseMode::analytic ? "analytic"
                                                                                                : "monte_carlo"));
    w.key("mc_samples").value(c.mc_samples);
    w.key("seed").value(c.seed);
    w.key("runs").value(job.runs);
    w.end_object();
    w.key("stages").begin_array();
    for (const auto& st : rec.stages) {
      w.begin_object();
      w.key("stage").value(static_cast<std::uint64_t>(st.stage));
      w.key("entropy").value(st.entropy);
      w.key("rho").value(st.rho.matrix());
      if (st.outcome) w.key("outcome").value(outcome_name(*st.outcome));
      w.end_object();
    }
    w.end_array();
    if (rec.born_frequencies) {
      w.key("frequencies").begin_object();
      w.key("up").value(rec.born_frequencies->first);
      w.key("down").value(rec.born_frequencies->second);
      w.end_object();
    }
    w.end_object();
    out << '\n';
  }
  const auto [p_up, p_down] = measurement::born_weights(rec.stages[3].rho);
  sum.key_metrics["S2"] = run.s2;
  sum.key_metrics["p_up"] = p_up;
  sum.key_metrics["coherence_stage2"] = measurement::branch_coherence(rec.stages[2].rho);
  sum.key_metrics["runs"] = static_cast<double>(job.runs);
  if (rec.born_frequencies) sum.key_metrics["freq_up"] = rec.born_frequencies->first;
}

void run_lindblad(const RunConfig& rc, const LindbladJob& job, std::ostream& out, RunSummary& sum) {
  const Trajectory tr = evolve_lindblad(job.model, job.rho0, job.times, job.dt_max);
  const std::size_t n = job.model.dim();
  if (rc.format == Format::csv) {
    out << "t,S";
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) out << ",rho_re_" << r << c << ",rho_im_" << r << c;
    out << '\n';
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      out << csv_real(tr.times[i]) << ',' << csv_real(tr.entropies[i]);
      const ComplexMatrix& m = tr.states[i].matrix();
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) out << ',' << csv_real(m(r, c).real()) << ',' << csv_real(m(r, c).imag());
      out << '\n';
    }
  } else {
    JsonWriter w(out);
    w.begin_object();
    w.key("dim").value(static_cast<std::uint64_t>(n));
    w.key("dt_max").value(job.dt_max);
    w.key("points").begin_array();
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      w.begin_object();
      w.key("t").value(tr.times[i]);
      w.key("S").value(tr.entropies[i]);
      w.key("rho").value(tr.states[i].matrix());
      w.end_object();
    }
    w.end_array();
    w.end_object();
    out << '\n';
  }
  sum.key_metrics["points"] = static_cast<double>(tr.times.size());
  sum.key_metrics["S_initial"] = tr.entropies.front();
  sum.key_metrics["S_final"] = tr.entropies.back();
}

void run_kaon(const RunConfig& rc, const KaonJob& job, std::ostream& out, RunSummary& sum) {
  const auto rows = cptest::violation_scan(job.model, job.betas, job.epsilons);
  double max_oracle = 0.0;
  double max_diff = 0.0;
  for (const auto& r : rows) {
    max_oracle = std::max(max_oracle, std::abs(r.lambda_oracle));
    max_diff = std::max(max_diff, std::abs(r.lambda_oracle - r.lambda_perturbative));
  }
  if (rc.format == Format::csv) {
    out << "beta,epsilon,re_lambda_pert,im_lambda_pert,re_lambda_oracle,im_lambda_oracle,ratio\n";
    for (const auto& r : rows)
      out << r.beta << ',' << csv_real(r.epsilon) << ',' << csv_real(r.lambda_perturbative.real()) << ','
          << csv_real(r.lambda_perturbative.imag()) << ',' << csv_real(r.lambda_oracle.real()) << ','
          << csv_real(r.lambda_oracle.imag()) << ',' << csv_real(r.epsilon_order_check) << '\n';
  } else {
    JsonWriter w(out);
    w.begin_array();
    for (const auto& r : rows) {
      w.begin_object();
      w.key("beta").value(static_cast<std::uint64_t>(r.beta));
      w.key("epsilon").value(r.epsilon);
      w.key("lambda_pert").value(r.lambda_perturbative);
      w.key("lambda_oracle").value(r.lambda_oracle);
      w.key("ratio").value(r.epsilon_order_check);
      w.end_object();
    }
    w.end_array();
    out << '\n';
  }
  sum.key_metrics["rows"] = static_cast<double>(rows.size());
  sum.key_metrics["max_abs_lambda_oracle"] = max_oracle;
  sum.key_metrics["max_abs_pert_minus_oracle"] = max_diff;
}

void run_mix(const RunConfig& rc, const MixJob& job, std::ostream& out, RunSummary& sum) {
  std::optional<phasemix::RetrodictionReport> retro;
  phasemix::MixingRun run;
  if (job.start_b) {
    retro = phasemix::retrodiction_demo(job.start, *job.start_b, job.steps, job.block, job.coarsen_every);
    run = retro->run_a;
  } else {
    run = phasemix::run_mixing(job.start, job.steps, job.block, job.coarsen_every);
  }
  if (rc.format == Format::csv) {
    out << "step,entropy,support" << (retro ? ",tv_distance" : "") << '\n';
    for (std::size_t i = 0; i < run.entropy_series.size(); ++i) {
      out << i << ',' << csv_real(run.entropy_series[i]) << ',' << run.support_series[i];
      if (retro) out << ',' << csv_real(retro->tv_series[i]);
      out << '\n';
    }
  } else {
    JsonWriter w(out);
    w.begin_object();
    w.key("N").value(static_cast<std::uint64_t>(job.start.side()));
    w.key("b").value(static_cast<std::uint64_t>(job.block));
    w.key("coarsen_every").value(static_cast<std::uint64_t>(job.coarsen_every));
    w.key("steps").begin_array();
    for (std::size_t i = 0; i < run.entropy_series.size(); ++i) {
      w.begin_object();
      w.key("step").value(static_cast<std::uint64_t>(i));
      w.key("entropy").value(run.entropy_series[i]);
      w.key("support").value(static_cast<std::uint64_t>(run.support_series[i]));
      if (retro) w.key("tv_distance").value(retro->tv_series[i]);
      w.end_object();
    }
    w.end_array();
    w.end_object();
    out << '\n';
  }
  sum.key_metrics["S_final"] = run.entropy_series.back();
  sum.key_metrics["support_final"] = static_cast<double>(run.support_series.back());
  if (retro) {
    sum.key_metrics["tv_initial"] = retro->initial_tv;
    sum.key_metrics["tv_final"] = retro->final_tv;
  }
}

void write_stats(JsonWriter& w, const worldledger::LedgerStats& s) {
  w.begin_object();
  w.key("n_worlds").value(static_cast<std::uint64_t>(s.n_worlds));
  w.key("n_splits").value(static_cast<std::uint64_t>(s.n_splits));
  w.key("n_merges").value(static_cast<std::uint64_t>(s.n_merges));
  w.key("ensemble_entropy").value(s.ensemble_entropy);
  w.end_object();
}

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ";" : "") + xs[i];
  return out;
}

void run_ledger(const RunConfig& rc, const LedgerJob& job, std::ostream& out, RunSummary& sum) {
  const auto res = worldledger::run_script(job.script, job.options);
  const auto events = res.ledger.events();
  if (rc.format == Format::json) {
    JsonWriter w(out);
    w.begin_object();
    w.key("events").begin_array();
    for (const auto& ev : events) {
      w.begin_object();
      if (const auto* s = std::get_if<worldledger::SplitEvent>(&ev)) {
        w.key("type").value(std::string_view("split"));
        w.key("parent").value(std::string_view(s->parent));
        w.key("children").begin_array();
        for (const auto& c : s->children) w.value(std::string_view(c));
        w.end_array();
        w.key("probs").value(s->probs);
      } else {
        const auto& m = std::get<worldledger::MergeEvent>(ev);
        w.key("type").value(std::string_view("merge"));
        w.key("parents").begin_array();
        for (const auto& p : m.parents) w.value(std::string_view(p));
        w.end_array();
        w.key("child").value(std::string_view(m.child));
      }
      w.end_object();
    }
    w.end_array();
    w.key("snapshots").begin_array();
    for (const auto& snap : res.snapshots) {
      w.begin_object();
      w.key("command_index").value(static_cast<std::uint64_t>(snap.command_index));
      w.key("stats");
      write_stats(w, snap.stats);
      w.end_object();
    }
    w.end_array();
    w.key("worlds").begin_array();
    for (const auto& world : res.ledger.worlds()) {
      w.begin_object();
      w.key("id").value(std::string_view(world.id));
      w.key("weight").value(world.weight);
      w.key("stage").value(static_cast<double>(world.stage));
      w.end_object();
    }
    w.end_array();
    w.key("stats");
    write_stats(w, res.stats);
    w.end_object();
    out << '\n';
  } else {
    out << "event,type,parents,children,probs\n";
    for (std::size_t i = 0; i < events.size(); ++i) {
      if (const auto* s = std::get_if<worldledger::SplitEvent>(&events[i])) {
        std::string probs;
        for (std::size_t k = 0; k < s->probs.size(); ++k) probs += (k ? ";" : "") + csv_real(s->probs[k]);
        out << i << ",split," << s->parent << ',' << join(s->children) << ',' << probs << '\n';
      } else {
        const auto& m = std::get<worldledger::MergeEvent>(events[i]);
        out << i << ",merge," << join(m.parents) << ',' << m.child << ",\n";
      }
    }
  }
  sum.key_metrics["n_worlds"] = static_cast<double>(res.stats.n_worlds);
  sum.key_metrics["n_splits"] = static_cast<double>(res.stats.n_splits);
  sum.key_metrics["n_merges"] = static_cast<double>(res.stats.n_merges);
  sum.key_metrics["ensemble_entropy"] = res.stats.ensemble_entropy;
}

}  // namespace

RunSummary execute(const RunConfig& config, const ModuleConfig& job, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  RunSummary sum;
  sum.command = std::string(command_name(config.command));
  sum.seed = config.seed;
  std::visit(
      [&](const auto& j) {
        using J = std::decay_t<decltype(j)>;
        if constexpr (std::is_same_v<J, MeasureJob>) run_measure(config, j, out, sum);
        else if constexpr (std::is_same_v<J, LindbladJob>) run_lindblad(config, j, out, sum);
        else if constexpr (std::is_same_v<J, KaonJob>) run_kaon(config, j, out, sum);
        else if constexpr (std::is_same_v<J, MixJob>) run_mix(config, j, out, sum);
        else run_ledger(config, j, out, sum);
      },
      job);
  sum.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return sum;
}

int run_main(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  try {
    const auto rc = parse_args(args, out);
    if (!rc) return 0;
    const ModuleConfig job = load_config(rc->config_path, rc->command, rc->seed);
    // Render fully before touching the destination so a failed run leaves no
    // partial artifact behind.
    std::ostringstream buffer;
    const RunSummary sum = execute(*rc, job, buffer);
    if (rc->out_path.empty()) {
      out << buffer.str();
    } else {
      std::ofstream file(rc->out_path, std::ios::binary);
      if (!file) throw ConfigError("cannot write '" + rc->out_path + "'");
      file << buffer.str();
      if (!file.flush()) throw ConfigError("write failed for '" + rc->out_path + "'");
    }
    err << summary_to_json(sum) << '\n';
    return 0;
  } catch (const Error& e) {
    err << "qdm: error: " << e.what() << '\n';
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    err << "qdm: internal error: " << e.what() << '\n';
    return 4;
  }
}

}  // namespace qdm::cli
