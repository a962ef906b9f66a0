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

#include "cbsbeam/counter.hpp"
#include "cbsbeam/metrics.hpp"

#include "json.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <thread>

namespace cbs
{
    using nlohmann::json;
    namespace fs = std::filesystem;

    namespace
    {
        const double nan = std::numeric_limits<double>::quiet_NaN();

        std::string fmt(double v)
        {
            if (std::isnan(v))
                return "nan";
            if (std::isinf(v))
                return v > 0 ? "inf" : "-inf";
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.10g", v);
            return buf;
        }

        // JSON cannot hold NaN; missing values become null.
        json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

        std::string clean(std::string s)
        {
            for (char &c : s)
                if (c == ',' || c == '\n' || c == '\r')
                    c = ';';
            return s;
        }

        std::string resolve(const std::string &base, const std::string &path)
        {
            if (path.empty() || path[0] == '/' || base.empty())
                return path;
            return (fs::path(base) / path).string();
        }

        std::ofstream open_out(const fs::path &p)
        {
            std::ofstream os(p, std::ios::binary);
            if (!os)
                throw std::runtime_error("cannot write " + p.string());
            return os;
        }

        bool snr_independent(Family f)
        {
            return f == Family::mrc || f == Family::zf || f == Family::cbs_mrc || f == Family::cbs_mrc_whitened ||
                   f == Family::nf_cbs_mrc;
        }

        bool nearfield_family(Family f) { return f == Family::nf_cbs_mrc || f == Family::nf_cbs_mmse; }

        struct Context
        {
            const ScenarioConfig &cfg;
            ArrayGeometry geom;
            std::optional<FilterBank> bank;
            std::optional<CbsOperator> nf_op;
            std::optional<BandSpec> band;
        };

        std::vector<UserLocation> place_users(const ScenarioConfig &cfg, const ArrayGeometry &geom, Rng &rng)
        {
            std::vector<UserLocation> users;
            switch (cfg.placement)
            {
            case Placement::explicit_list:
                return cfg.users;
            case Placement::uniform_omega:
            {
                std::uniform_real_distribution<double> u(-pi, pi);
                for (int k = 0; k < cfg.n_users; ++k)
                    users.push_back(UserLocation::from_omega(geom, u(rng), cfg.distance_m));
                break;
            }
            case Placement::uniform_angle:
            {
                std::uniform_real_distribution<double> u(-pi / 2, pi / 2);
                for (int k = 0; k < cfg.n_users; ++k)
                    users.push_back({cfg.distance_m, u(rng)});
                break;
            }
            }
            return users;
        }

        Beamformer build(const Context &ctx, Family f, const ChannelMatrix &ch, const PowerProfile &powers,
                         const PassbandSelection &sel)
        {
            const ScenarioConfig &c = ctx.cfg;
            switch (f)
            {
            case Family::mrc:
                return mrc(ch);
            case Family::zf:
                return zf(ch);
            case Family::mmse:
                return mmse(ch, powers);
            case Family::cbs_mrc:
                return cbs_mrc_bank(*ctx.bank, ch, false);
            case Family::cbs_mrc_whitened:
                return cbs_mrc_bank(*ctx.bank, ch, true);
            case Family::cbs_mmse:
                return cbs_mmse_bank(*ctx.bank, ch, powers, 1, 0, false);
            case Family::cbs_mmse_decimated:
                return cbs_mmse_bank(*ctx.bank, ch, powers, c.decimation_interval, c.decimation_offset, false);
            case Family::cbs_mmse_whitened:
                return cbs_mmse_bank(*ctx.bank, ch, powers, 1, 0, true);
            case Family::nf_cbs_mrc:
                return cbs_nearfield(*ctx.nf_op, ch, powers, sel, NearFieldFamily::mrc);
            case Family::nf_cbs_mmse:
                return cbs_nearfield(*ctx.nf_op, ch, powers, sel, NearFieldFamily::mmse);
            }
            throw std::logic_error("unhandled family");
        }

        double mean_db(const RVector &sinr, const std::vector<int> &users)
        {
            double acc = 0.0;
            int n = 0;
            for (int k : users)
                if (!std::isnan(sinr(k)))
                {
                    acc += to_db(sinr(k));
                    ++n;
                }
            return n ? acc / n : nan;
        }

        struct TrialOut
        {
            std::vector<TrialRow> rows;
            std::vector<UserLocation> users;
            std::vector<int> passband;
            std::vector<double> omega;
        };

        TrialOut run_trial(const Context &ctx, int trial)
        {
            const ScenarioConfig &c = ctx.cfg;
            TrialOut out;
            Rng rng(derive_seed(c.seed, static_cast<std::uint64_t>(trial), 0, 0));
            out.users = place_users(c, ctx.geom, rng);
            const int K = static_cast<int>(out.users.size());
            std::optional<ScattererSet> scat;
            if (c.nlos)
                scat = build_one_ring(out.users, c.scatterers_per_user, c.ring_radius_m, rng);
            const ChannelMatrix ch = assemble_channel(ctx.geom, out.users, c.model, scat ? &*scat : nullptr, c.beta0);
            for (int k = 0; k < K; ++k)
                out.omega.push_back(ch.omega(k));

            PassbandSelection sel;
            if (ctx.band)
                sel = select_passband(ch, *ctx.band);
            else
            {
                sel.n_total = K;
                for (int k = 0; k < K; ++k)
                    sel.users.push_back(k);
            }
            out.passband = sel.users;

            ScenarioDims dims;
            dims.N = static_cast<std::uint64_t>(c.n_elements);
            dims.K = static_cast<std::uint64_t>(K);
            dims.N_d = static_cast<std::uint64_t>(c.decimation_interval);
            if (ctx.bank)
            {
                dims.L = static_cast<std::uint64_t>(c.filter_length);
                dims.M = static_cast<std::uint64_t>(ctx.bank->size());
                for (const auto &s : bank_selections(*ctx.bank, ch))
                    dims.K_m.push_back(static_cast<std::uint64_t>(s.size()));
            }
            ScenarioDims nf_dims = dims;
            if (ctx.nf_op)
            {
                nf_dims.L = static_cast<std::uint64_t>(ctx.nf_op->filter_length());
                nf_dims.K = static_cast<std::uint64_t>(sel.size());
                nf_dims.M = 1;
                nf_dims.K_m = {nf_dims.K};
            }

            const CMatrix probe = CMatrix::Zero(c.n_elements, 1);
            for (Family f : c.families)
            {
                std::optional<Beamformer> fixed;
                std::string fixed_error;
                if (snr_independent(f))
                {
                    try
                    {
                        fixed = build(ctx, f, ch, PowerProfile::uniform(K, 1.0), sel);
                    }
                    catch (const std::exception &e)
                    {
                        fixed_error = e.what();
                    }
                }
                for (double snr_db : c.snr_db)
                {
                    TrialRow row;
                    row.family = f;
                    row.snr_db = snr_db;
                    row.trial = trial;
                    row.multiply_analytic = analytic_count(f, nearfield_family(f) ? nf_dims : dims);
                    try
                    {
                        if (!fixed_error.empty())
                            throw std::runtime_error(fixed_error);
                        // Receive SNR per element: P_i beta0 / (r_i^2 sigma^2).
                        PowerProfile powers = PowerProfile::uniform(K, 1.0);
                        for (int k = 0; k < K; ++k)
                            powers.snr(k) = from_db(snr_db) * out.users[k].distance_m * out.users[k].distance_m / c.beta0;
                        const Beamformer bf = fixed ? *fixed : build(ctx, f, ch, powers, sel);
                        row.sinr = sinr(bf, ch, powers, NoiseModel::post_cbs);
                        row.sum_rate = sum_rate(row.sinr);
                        std::vector<int> served;
                        for (int k = 0; k < K; ++k)
                            if (!std::isnan(row.sinr(k)))
                                served.push_back(k);
                        row.served = static_cast<int>(served.size());
                        row.mean_sinr_db = mean_db(row.sinr, served);
                        row.passband_sinr_db = mean_db(row.sinr, sel.users);
                        {
                            MultiplyScope scope(true);
                            detect(bf, probe);
                            row.multiply_measured = scope.count();
                        }
                        if (bf.underdetermined)
                            row.status = "ok:underdetermined";
                    }
                    catch (const std::exception &e)
                    {
                        row.status = "error: " + clean(e.what());
                        row.sinr = RVector::Constant(K, nan);
                        row.sum_rate = row.mean_sinr_db = row.passband_sinr_db = nan;
                    }
                    out.rows.push_back(std::move(row));
                }
            }
            return out;
        }

        bool ok(const TrialRow &r) { return r.status.rfind("ok", 0) == 0; }

        std::vector<SummaryRow> summarize(const ScenarioConfig &c, const std::vector<TrialRow> &rows)
        {
            std::vector<SummaryRow> out;
            for (Family f : c.families)
                for (double snr : c.snr_db)
                {
                    SummaryRow s;
                    s.family = f;
                    s.snr_db = snr;
                    std::vector<double> rates;
                    double pb = 0.0;
                    int npb = 0;
                    bool first = true;
                    for (const auto &r : rows)
                    {
                        if (r.family != f || r.snr_db != snr)
                            continue;
                        if (first)
                        {
                            s.multiply_analytic = r.multiply_analytic;
                            first = false;
                        }
                        if (!ok(r))
                            continue;
                        rates.push_back(r.sum_rate);
                        if (!std::isnan(r.passband_sinr_db))
                        {
                            pb += r.passband_sinr_db;
                            ++npb;
                        }
                    }
                    s.trials_ok = static_cast<int>(rates.size());
                    if (rates.empty())
                        s.mean_sum_rate = s.std_sum_rate = nan;
                    else
                    {
                        double m = 0.0;
                        for (double v : rates)
                            m += v;
                        m /= static_cast<double>(rates.size());
                        double var = 0.0;
                        for (double v : rates)
                            var += (v - m) * (v - m);
                        s.mean_sum_rate = m;
                        s.std_sum_rate = rates.size() > 1 ? std::sqrt(var / static_cast<double>(rates.size() - 1)) : 0.0;
                    }
                    s.mean_passband_sinr_db = npb ? pb / npb : nan;
                    out.push_back(s);
                }
            return out;
        }

        json summary_json(const std::vector<SummaryRow> &summary)
        {
            json a = json::array();
            for (const auto &s : summary)
                a.push_back({{"family", to_string(s.family)},
                             {"snr_db", s.snr_db},
                             {"trials_ok", s.trials_ok},
                             {"mean_sum_rate", jnum(s.mean_sum_rate)},
                             {"std_sum_rate", jnum(s.std_sum_rate)},
                             {"mean_passband_sinr_db", jnum(s.mean_passband_sinr_db)},
                             {"multiply_analytic", s.multiply_analytic}});
            return a;
        }
    }

    ScenarioResult run_scenario(const ScenarioConfig &cfg, const RunOptions &opt)
    {
        cfg.validate();
        const std::string text = serialize_scenario(cfg);
        ScenarioResult res;
        res.config_hash = config_hash(text);

        Context ctx{cfg, cfg.geometry(), std::nullopt, std::nullopt, std::nullopt};
        const fs::path out_dir = opt.out_dir.empty() ? fs::path(resolve(cfg.base_dir, cfg.out_dir)) : fs::path(opt.out_dir);
        if (opt.write_files)
            fs::create_directories(out_dir);

        if (cfg.filter == FilterKind::bank)
            ctx.bank = build_filter_bank(cfg.bank_size, cfg.filter_length, cfg.hamming);
        else
        {
            const BandSpecFile bsf = load_band_spec(resolve(cfg.base_dir, cfg.band_spec));
            if (bsf.spec.n_elements != cfg.n_elements)
                throw ConfigError("filter.band_spec", "band spec element count differs from array.n_elements");
            FirFilter filter;
            if (!cfg.filter_file.empty())
            {
                try
                {
                    filter = load_filter(resolve(cfg.base_dir, cfg.filter_file));
                }
                catch (const std::exception &e)
                {
                    throw ConfigError("filter.filter_file", e.what());
                }
                if (filter.length() != bsf.spec.filter_length)
                    throw ConfigError("filter.filter_file", "tap count differs from the band spec length");
            }
            else
            {
                DesignRun d = run_filter_design(bsf, out_dir.string(), opt.write_files);
                filter = d.filter;
                res.files.insert(res.files.end(), d.files.begin(), d.files.end());
            }
            ctx.band = bsf.spec;
            ctx.nf_op.emplace(filter, cfg.n_elements);
        }

        const int T = cfg.n_users > 0 ? cfg.trials : 0;
        std::vector<TrialOut> trials(static_cast<std::size_t>(T));
        std::atomic<int> next{0};
        auto worker = [&]()
        {
            for (int t = next++; t < T; t = next++)
                trials[static_cast<std::size_t>(t)] = run_trial(ctx, t);
        };
        const int nthreads = std::max(1, std::min(opt.threads, T));
        if (nthreads == 1)
            worker();
        else
        {
            std::vector<std::thread> pool;
            for (int i = 0; i < nthreads; ++i)
                pool.emplace_back(worker);
            for (auto &th : pool)
                th.join();
        }

        for (auto &t : trials)
        {
            res.users.push_back(t.users);
            res.passband.push_back(t.passband);
            for (auto &r : t.rows)
                res.rows.push_back(std::move(r));
        }
        res.summary = summarize(cfg, res.rows);
        if (!opt.write_files)
            return res;

        const std::string stem = cfg.name;
        {
            const fs::path p = out_dir / (stem + "_trials.csv");
            auto os = open_out(p);
            os << "family,snr_db,trial,sum_rate,mean_sinr_db,passband_sinr_db,served,multiply_analytic,"
                  "multiply_measured,status\n";
            for (const auto &r : res.rows)
                os << to_string(r.family) << ',' << fmt(r.snr_db) << ',' << r.trial << ',' << fmt(r.sum_rate) << ','
                   << fmt(r.mean_sinr_db) << ',' << fmt(r.passband_sinr_db) << ',' << r.served << ','
                   << r.multiply_analytic << ',' << r.multiply_measured << ',' << r.status << '\n';
            res.files.push_back(p.string());
        }
        {
            const fs::path p = out_dir / (stem + "_users.csv");
            auto os = open_out(p);
            os << "family,snr_db,trial,user,distance_m,angle_rad,omega,passband,sinr_db\n";
            for (const auto &r : res.rows)
            {
                const auto &t = trials[static_cast<std::size_t>(r.trial)];
                std::vector<char> inpb(t.users.size(), 0);
                for (int k : t.passband)
                    inpb[static_cast<std::size_t>(k)] = 1;
                for (std::size_t k = 0; k < t.users.size(); ++k)
                {
                    const double s = r.sinr.size() ? r.sinr(static_cast<Eigen::Index>(k)) : nan;
                    os << to_string(r.family) << ',' << fmt(r.snr_db) << ',' << r.trial << ',' << k << ','
                       << fmt(t.users[k].distance_m) << ',' << fmt(t.users[k].angle_rad) << ',' << fmt(t.omega[k]) << ','
                       << int(inpb[k]) << ',' << fmt(std::isnan(s) ? nan : to_db(s)) << '\n';
                }
            }
            res.files.push_back(p.string());
        }
        {
            const fs::path p = out_dir / (stem + "_summary.csv");
            auto os = open_out(p);
            os << "family,snr_db,trials_ok,mean_sum_rate,std_sum_rate,mean_passband_sinr_db,multiply_analytic\n";
            for (const auto &s : res.summary)
                os << to_string(s.family) << ',' << fmt(s.snr_db) << ',' << s.trials_ok << ',' << fmt(s.mean_sum_rate)
                   << ',' << fmt(s.std_sum_rate) << ',' << fmt(s.mean_passband_sinr_db) << ',' << s.multiply_analytic
                   << '\n';
            res.files.push_back(p.string());
        }
        {
            const fs::path p = out_dir / (stem + "_report.json");
            json j;
            j["kind"] = "scenario";
            j["name"] = cfg.name;
            j["config_hash"] = res.config_hash;
            j["seed"] = cfg.seed;
            j["trials"] = cfg.trials;
            j["n_users"] = cfg.n_users;
            j["snr_db"] = cfg.snr_db;
            json fam = json::array();
            for (Family f : cfg.families)
                fam.push_back(to_string(f));
            j["families"] = fam;
            j["summary"] = summary_json(res.summary);
            json fails = json::array();
            for (const auto &r : res.rows)
                if (!ok(r))
                    fails.push_back({{"family", to_string(r.family)}, {"snr_db", r.snr_db}, {"trial", r.trial},
                                     {"status", r.status}});
            j["failures"] = fails;
            if (ctx.bank)
            {
                ScenarioDims dims{static_cast<std::uint64_t>(cfg.n_elements), static_cast<std::uint64_t>(cfg.n_users),
                                  static_cast<std::uint64_t>(cfg.filter_length),
                                  static_cast<std::uint64_t>(cfg.bank_size),
                                  static_cast<std::uint64_t>(cfg.decimation_interval), {}};
                json cx = json::array();
                for (const auto &e : complexity_counts(dims))
                    cx.push_back({{"family", e.family}, {"exact", e.exact}, {"uniform", e.uniform}});
                j["complexity"] = cx;
            }
            json files = json::array();
            for (const auto &f : res.files)
                files.push_back(fs::path(f).filename().string());
            j["files"] = files;
            auto os = open_out(p);
            os << j.dump(2) << '\n';
            res.files.push_back(p.string());
        }
        return res;
    }

    DesignRun run_filter_design(const BandSpecFile &bsf, const std::string &out_dir, bool write_files)
    {
        DesignRun run;
        const auto t0 = std::chrono::steady_clock::now();
        auto [filter, state] = sca_design(bsf.spec, bsf.design);
        run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        run.filter = filter;
        run.state = state;
        GridOptions vg = bsf.design.grid;
        vg.mirror = true;
        vg.density_scale = bsf.verification_density;
        run.profile = evaluate_design(filter, bsf.spec, vg);
        if (!write_files)
            return run;

        const fs::path dir(out_dir);
        fs::create_directories(dir);
        const fs::path ff = dir / (bsf.name + ".filter");
        save_filter(ff.string(), filter);
        run.files.push_back(ff.string());

        {
            const fs::path p = dir / (bsf.name + "_profile.csv");
            auto os = open_out(p);
            os << "band,distance_m,omega_pi,sin_theta,norm,norm_db\n";
            const char *names[] = {"passband", "transition", "stopband"};
            const ArrayGeometry geom = design_geometry(bsf.spec);
            for (std::size_t i = 0; i < run.profile.points.size(); ++i)
            {
                const auto &q = run.profile.points[i];
                const double v = run.profile.norm(static_cast<Eigen::Index>(i));
                const double st = std::sin(UserLocation::from_omega(geom, q.omega, q.r).angle_rad);
                os << names[static_cast<int>(run.profile.bands[i])] << ',' << fmt(q.r) << ',' << fmt(q.omega / pi)
                   << ',' << fmt(st) << ',' << fmt(v) << ',' << fmt(20.0 * std::log10(v)) << '\n';
            }
            run.files.push_back(p.string());
        }
        {
            const fs::path p = dir / (bsf.name + "_design.json");
            const auto &s = state;
            const auto &pr = run.profile;
            json j;
            j["kind"] = "design";
            j["name"] = bsf.name;
            j["spec_hash"] = config_hash(serialize_band_spec(bsf));
            j["n_elements"] = bsf.spec.n_elements;
            j["filter_length"] = bsf.spec.filter_length;
            j["taps"] = to_string(bsf.design.taps);
            j["converged"] = s.converged;
            j["iterations"] = s.iterations;
            j["feasibility_iterations"] = s.feasibility_iterations;
            j["solver_newton_steps"] = s.solver_newton_steps;
            j["t_history"] = s.t_history;
            j["min_passband_history"] = s.min_passband_history;
            j["max_transition_history"] = s.max_transition_history;
            j["design_points"] = {{"passband", s.n_passband}, {"transition", s.n_transition}, {"stopband", s.n_stopband}};
            j["verification"] = {{"density", bsf.verification_density},
                                 {"points", pr.points.size()},
                                 {"min_passband", jnum(pr.min_passband)},
                                 {"max_passband", jnum(pr.max_passband)},
                                 {"max_transition", jnum(pr.max_transition)},
                                 {"max_stopband", jnum(pr.max_stopband)},
                                 {"ripple_db", jnum(pr.ripple_db)},
                                 {"gap_db", jnum(pr.gap_db)},
                                 {"passband_violations", pr.passband_violations},
                                 {"transition_violations", pr.transition_violations}};
            json files = json::array();
            for (const auto &f : run.files)
                files.push_back(fs::path(f).filename().string());
            j["files"] = files;
            auto os = open_out(p);
            os << j.dump(2) << '\n';
            run.files.push_back(p.string());
        }
        return run;
    }

    std::vector<std::string> export_plotdata(const std::string &report_path, const std::string &tag,
                                             const std::string &out_dir)
    {
        std::ifstream in(report_path);
        if (!in)
            throw ConfigError("report", "cannot open " + report_path);
        json j;
        try
        {
            in >> j;
        }
        catch (const json::exception &e)
        {
            throw ConfigError("report", std::string("not valid JSON: ") + e.what());
        }

        struct Curve
        {
            std::string name;
            std::vector<std::pair<double, double>> xy;
        };
        std::vector<Curve> curves;
        try
        {
            if (tag == "sum-rate" || tag == "sinr")
            {
                if (j.value("kind", "") != "scenario")
                    throw ConfigError("tag", tag + " needs a scenario report");
                const char *key = tag == "sum-rate" ? "mean_sum_rate" : "mean_passband_sinr_db";
                for (const auto &f : j.at("families"))
                {
                    Curve c{f.get<std::string>(), {}};
                    for (const auto &s : j.at("summary"))
                        if (s.at("family") == f && !s.at(key).is_null())
                            c.xy.emplace_back(s.at("snr_db").get<double>(), s.at(key).get<double>());
                    curves.push_back(std::move(c));
                }
            }
            else if (tag == "sca")
            {
                if (j.value("kind", "") != "design")
                    throw ConfigError("tag", "sca needs a design report");
                for (const char *key : {"t_history", "min_passband_history", "max_transition_history"})
                {
                    Curve c{key, {}};
                    const auto &h = j.at(key);
                    for (std::size_t i = 0; i < h.size(); ++i)
                        c.xy.emplace_back(static_cast<double>(i), h[i].get<double>());
                    curves.push_back(std::move(c));
                }
            }
            else
                throw ConfigError("tag", "unknown tag '" + tag + "' (sum-rate, sinr, sca)");
        }
        catch (const json::exception &e)
        {
            throw ConfigError("report", std::string("missing field: ") + e.what());
        }

        const fs::path dir(out_dir);
        fs::create_directories(dir);
        std::vector<std::string> files;
        const fs::path manifest = dir / (tag + "_manifest.txt");
        auto ms = open_out(manifest);
        ms << "curve file points\n";
        for (const auto &c : curves)
        {
            const fs::path p = dir / (tag + "_" + c.name + ".dat");
            auto os = open_out(p);
            os << "x y\n";
            for (const auto &[x, y] : c.xy)
                os << fmt(x) << ' ' << fmt(y) << '\n';
            ms << c.name << ' ' << p.filename().string() << ' ' << c.xy.size() << '\n';
            files.push_back(p.string());
        }
        files.push_back(manifest.string());
        return files;
    }
}
