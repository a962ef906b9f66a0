// SPDX-License-Identifier: Apache-2.0
//
// cbsbeam: convolutional beamspace processing for multi-user MIMO receivers
// Copyright (C) 2026 The cbsbeam authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
#include "cbsbeam/scenario.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>

namespace
{
    int design_filter(const std::string &spec_path, const std::string &out_dir, bool verbose)
    {
        cbs::BandSpecFile spec = cbs::load_band_spec(spec_path);
        spec.design.verbose = verbose;
        const cbs::DesignRun run = cbs::run_filter_design(spec, out_dir);
        const auto &st = run.state;
        const auto &pr = run.profile;
        std::printf("%s: %d SCA iterations (%d feasibility), %s, %.1f s\n", spec.name.c_str(), st.iterations,
                    st.feasibility_iterations, st.converged ? "converged" : "iteration limit", run.seconds);
        std::printf("  design grid   : %zu passband, %zu transition, %zu stopband points\n", st.n_passband,
                    st.n_transition, st.n_stopband);
        std::printf("  verification  : min passband %.6f, max transition %.6f, max stopband %.6f\n", pr.min_passband,
                    pr.max_transition, pr.max_stopband);
        std::printf("  gap %.2f dB, passband ripple %.2f dB, %d passband / %d transition violations\n", pr.gap_db,
                    pr.ripple_db, pr.passband_violations, pr.transition_violations);
        for (const auto &f : run.files)
            std::printf("  wrote %s\n", f.c_str());
        return 0;
    }

    int run(const std::string &config_path, const std::optional<std::uint64_t> &seed, int threads,
            const std::string &out_dir)
    {
        cbs::ScenarioConfig cfg = cbs::load_scenario(config_path);
        if (seed)
            cfg.seed = *seed;
        cbs::RunOptions opt;
        opt.threads = threads;
        opt.out_dir = out_dir;
        const cbs::ScenarioResult res = cbs::run_scenario(cfg, opt);

        std::printf("%s (config %s, seed %llu, %d trials)\n", cfg.name.c_str(), res.config_hash.c_str(),
                    static_cast<unsigned long long>(cfg.seed), cfg.trials);
        std::printf("%-20s", "snr_db");
        for (double s : cfg.snr_db)
            std::printf("%9.1f", s);
        std::printf("\n");
        std::map<cbs::Family, std::vector<double>> rates;
        for (const auto &s : res.summary)
            rates[s.family].push_back(s.mean_sum_rate);
        for (cbs::Family f : cfg.families)
        {
            std::printf("%-20s", cbs::to_string(f).c_str());
            for (double v : rates[f])
                std::printf("%9.3f", v);
            std::printf("\n");
        }
        int failures = 0;
        for (const auto &r : res.rows)
            if (r.status.rfind("ok", 0) != 0)
                ++failures;
        if (failures)
            std::printf("%d rows failed; see the status column\n", failures);
        for (const auto &f : res.files)
            std::printf("wrote %s\n", f.c_str());
        return 0;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"cbsbeam: convolutional beamspace receivers and near-field spatial filter design"};
    app.require_subcommand(1);

    std::string out_dir;
    std::string spec_path;
    bool verbose = false;
    auto *design = app.add_subcommand("design-filter", "Design a near-field spatial filter from a band spec file");
    design->add_option("spec", spec_path, "Band spec file")->required();
    design->add_option("--out-dir", out_dir, "Output directory")->default_val(".");
    design->add_flag("-v,--verbose", verbose, "Print the SCA trajectory");

    std::string config_path;
    std::optional<std::uint64_t> seed;
    int threads = 1;
    std::string run_out;
    auto *runc = app.add_subcommand("run", "Run a scenario config");
    runc->add_option("config", config_path, "Scenario config file")->required();
    runc->add_option("--seed", seed, "Override the master seed");
    runc->add_option("--threads", threads, "Worker threads for trials")->check(CLI::PositiveNumber);
    runc->add_option("--out-dir", run_out, "Output directory (default: the config's out_dir)");

    std::string report, tag, export_out = ".";
    auto *exp = app.add_subcommand("export", "Write plot data from a report");
    exp->add_option("report", report, "Report JSON written by run or design-filter")->required();
    exp->add_option("tag", tag, "sum-rate | sinr | sca")->required();
    exp->add_option("--out-dir", export_out, "Output directory");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try
    {
        if (*design)
            return design_filter(spec_path, out_dir, verbose);
        if (*runc)
            return run(config_path, seed, threads, run_out);
        for (const auto &f : cbs::export_plotdata(report, tag, export_out))
            std::printf("wrote %s\n", f.c_str());
        return 0;
    }
    catch (const cbs::ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    catch (const cbs::SolverError &e)
    {
        std::cerr << "solver failure: " << e.what() << '\n';
        return 3;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
