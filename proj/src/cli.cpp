// Copyright 2026 the stepscope authors
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

#include "stepscope/cli.hpp"

#include <fstream>
#include <ostream>

#include <CLI11.hpp>

#include "stepscope/bench.hpp"
#include "stepscope/errors.hpp"
#include "stepscope/pipeline.hpp"
#include "stepscope/report.hpp"

namespace stepscope {

namespace {

void write_output(const std::string& text, const std::optional<std::string>& out_path,
                  std::ostream& out) {
    if (!out_path) {
        out << text;
        return;
    }
    std::ofstream f(*out_path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + *out_path + "' for writing");
    f << text;
    if (!f) throw IoError("write failed for '" + *out_path + "'");
}

std::string hint_line(const Hint& h) {
    return std::string(severity_tag(h.severity)) + " " + hint_name(h.code) + " [step " +
           std::to_string(h.step_index) + "] " + h.message;
}

const std::set<HintCode> kAllHintCodes = {
    HintCode::P1_SortFlagBroadcast, HintCode::P2_SortFlagArity, HintCode::P3_JoinKeyMissing,
    HintCode::P4_AggNonNumeric,     HintCode::P5_LimitNonpositive, HintCode::P6_UnknownColumn,
    HintCode::P7_JoinTypeMismatch,  HintCode::A1_EmptyResult,      HintCode::A2_NoopFilter,
    HintCode::A3_JoinExplosion,     HintCode::A4_NullGrowth,       HintCode::A5_HeavyDedup,
    HintCode::A6_SampleKeyDisjoint,
};

} // namespace

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
    if (opts.format != "text" && opts.format != "json") {
        err << "error: unknown format '" << opts.format << "'\n";
        return kExitSpec;
    }

    HintConfig hcfg;
    if (opts.join_explosion_factor) hcfg.join_explosion_factor = *opts.join_explosion_factor;
    if (opts.null_growth_delta) hcfg.null_growth_delta = *opts.null_growth_delta;
    if (opts.dedup_ratio) hcfg.dedup_ratio = *opts.dedup_ratio;
    if (!opts.hints) hcfg.disabled = kAllHintCodes;
    try {
        hcfg.validate();
    } catch (const EngineError& e) {
        err << "error: " << e.what() << '\n';
        return kExitSpec;
    }

    try {
        const PipelineSpec spec = parse_spec_file(opts.spec_path);

        const PlanInfo plan = validate_plan(spec);
        for (const PlanError& e : plan.errors) {
            if (e.step_index == spec.steps.size())
                err << "ERROR [source] " << e.message << '\n';
            else
                err << "ERROR [step " << e.step_index << "] " << e.message << '\n';
        }
        // Error-severity hints always print; the rest only with hints on.
        for (const Hint& h : plan.hints)
            if (h.severity == Severity::Error || opts.hints) err << hint_line(h) << '\n';
        if (!plan.ok()) return kExitSpec;

        TraceConfig tcfg;
        tcfg.enabled = opts.trace;
        tcfg.sample_size = opts.sample_size;
        tcfg.seed = opts.seed;

        const ExecResult result = execute(spec, tcfg, hcfg);

        if (!opts.trace) {
            std::string text = "rows: " + std::to_string(result.output->row_count()) + "\n" +
                               "duration_ns: " + std::to_string(result.trace.totals.duration_ns) +
                               "\n";
            write_output(text, opts.out_path, out);
            return kExitOk;
        }
        const std::string report =
            opts.format == "json" ? emit_json(result.trace) : emit_text(result.trace);
        write_output(report, opts.out_path, out);
        return kExitOk;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitSpec;
    } catch (const PlanInvalid& e) {
        err << "error: " << e.what() << '\n';
        return kExitSpec;
    } catch (const StepError& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

int cmd_bench(const BenchOptions& opts, std::ostream& out, std::ostream& err) {
    std::vector<std::string> programs =
        opts.programs.empty() ? bench_program_ids() : opts.programs;
    for (const std::string& p : programs) {
        if (!is_bench_program(p)) {
            err << "error: unknown bench program '" << p << "'\n";
            return kExitSpec;
        }
    }
    if (opts.reps == 0) {
        err << "error: --reps must be >= 1\n";
        return kExitSpec;
    }
    if (opts.scales.empty()) {
        err << "error: --scales must name at least one row count\n";
        return kExitSpec;
    }
    for (std::uint64_t s : opts.scales) {
        if (s == 0) {
            err << "error: scales must be positive\n";
            return kExitSpec;
        }
    }

    std::vector<BenchResult> results;
    for (const std::string& p : programs) {
        for (std::uint64_t scale : opts.scales) {
            err << "bench " << p << " @ " << scale << " rows, " << opts.reps << "+"
                << opts.reps << " reps" << std::endl;
            try {
                results.push_back(run_benchmark(p, scale, opts.reps, /*seed=*/0));
            } catch (const std::exception& e) {
                err << "error: program " << p << " at scale " << scale << ": " << e.what()
                    << '\n';
                return kExitRuntime;
            }
        }
    }

    const BenchSummary summary = summarize(results);
    try {
        write_output(summary.csv, opts.out_path, out);
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    out << summary.table;
    for (const std::string& p : summary.flagged)
        out << "flag: overhead ratio rises with scale for " << p << '\n';
    return kExitOk;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"step-level dataframe pipeline runner with tracing and benchmarks"};
    app.require_subcommand(1);

    RunOptions ro;
    bool no_trace = false;
    bool no_hints = false;
    std::string run_out;
    double jef = 0, ngd = 0, ddr = 0;

    CLI::App* run = app.add_subcommand("run", "execute a pipeline spec with tracing");
    run->add_option("spec", ro.spec_path, "pipeline spec JSON file")->required();
    run->add_flag("--no-trace", no_trace, "execute without capture; print row count and totals");
    run->add_option("--sample-size", ro.sample_size, "reservoir size k (default 20)");
    run->add_option("--seed", ro.seed, "sampling seed (default 0)");
    run->add_flag("--no-hints", no_hints, "suppress info/warn hints and anomaly detection");
    run->add_option("--format", ro.format, "report format: text or json (default text)");
    CLI::Option* out_opt = run->add_option("--out", run_out, "write the report to a file");
    CLI::Option* jef_opt =
        run->add_option("--join-explosion-factor", jef, "A3 threshold factor (default 10)");
    CLI::Option* ngd_opt =
        run->add_option("--null-growth-delta", ngd, "A4 fraction rise threshold (default 0.5)");
    CLI::Option* ddr_opt = run->add_option("--dedup-ratio", ddr, "A5 threshold (default 0.9)");

    BenchOptions bo;
    CLI::App* bench = app.add_subcommand("bench", "run the overhead benchmark suite");
    bench->add_option("--scales", bo.scales, "row counts (default 10000,100000,1000000)")
        ->delimiter(',');
    bench->add_option("--reps", bo.reps, "timed repetitions per mode (default 20)");
    bench->add_option("--out", bo.out_path, "results CSV path (default results.csv)");
    bench->add_option("--programs", bo.programs, "subset of B1..B6 (default all)")
        ->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitSpec;
    }

    if (run->parsed()) {
        ro.trace = !no_trace;
        ro.hints = !no_hints;
        if (out_opt->count() > 0) ro.out_path = run_out;
        if (jef_opt->count() > 0) ro.join_explosion_factor = jef;
        if (ngd_opt->count() > 0) ro.null_growth_delta = ngd;
        if (ddr_opt->count() > 0) ro.dedup_ratio = ddr;
        return cmd_run(ro, out, err);
    }
    return cmd_bench(bo, out, err);
}

} // namespace stepscope
