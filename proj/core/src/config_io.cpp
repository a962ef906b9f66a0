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

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace cbs
{
    namespace pt = boost::property_tree;

    namespace
    {
        std::string num(double v)
        {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return buf;
        }

        std::string trim(std::string s)
        {
            boost::algorithm::trim(s);
            return s;
        }

        std::vector<std::string> split_list(const std::string &s, const char *seps = ",")
        {
            std::vector<std::string> parts, out;
            boost::algorithm::split(parts, s, boost::algorithm::is_any_of(seps));
            for (auto &p : parts)
                if (!trim(p).empty())
                    out.push_back(trim(p));
            return out;
        }

        // Typed reads that report "section.key" on failure and reject unknown keys.
        class Reader
        {
        public:
            explicit Reader(const pt::ptree &tree) : tree_(tree) {}

            bool has(const std::string &path) const
            {
                used_.insert(path);
                return static_cast<bool>(tree_.get_optional<std::string>(path));
            }

            std::string str(const std::string &path, const std::string &def) const
            {
                used_.insert(path);
                auto v = tree_.get_optional<std::string>(path);
                return v ? trim(*v) : def;
            }

            std::string required(const std::string &path) const
            {
                used_.insert(path);
                auto v = tree_.get_optional<std::string>(path);
                if (!v || trim(*v).empty())
                    throw ConfigError(path, "missing required key");
                return trim(*v);
            }

            double real(const std::string &path, double def) const
            {
                if (!has(path))
                    return def;
                return to_real(path, str(path, ""));
            }

            long long integer(const std::string &path, long long def) const
            {
                if (!has(path))
                    return def;
                const std::string s = str(path, "");
                try
                {
                    std::size_t pos = 0;
                    long long v = std::stoll(s, &pos);
                    if (pos != s.size())
                        throw std::invalid_argument(s);
                    return v;
                }
                catch (const std::exception &)
                {
                    throw ConfigError(path, "expected an integer, got '" + s + "'");
                }
            }

            std::uint64_t unsigned_integer(const std::string &path, std::uint64_t def) const
            {
                if (!has(path))
                    return def;
                const std::string s = str(path, "");
                try
                {
                    std::size_t pos = 0;
                    if (!s.empty() && s[0] == '-')
                        throw std::invalid_argument(s);
                    unsigned long long v = std::stoull(s, &pos);
                    if (pos != s.size())
                        throw std::invalid_argument(s);
                    return v;
                }
                catch (const std::exception &)
                {
                    throw ConfigError(path, "expected a non-negative integer, got '" + s + "'");
                }
            }

            bool boolean(const std::string &path, bool def) const
            {
                if (!has(path))
                    return def;
                std::string s = boost::algorithm::to_lower_copy(str(path, ""));
                if (s == "true" || s == "yes" || s == "on" || s == "1")
                    return true;
                if (s == "false" || s == "no" || s == "off" || s == "0")
                    return false;
                throw ConfigError(path, "expected a boolean, got '" + s + "'");
            }

            static double to_real(const std::string &path, const std::string &s)
            {
                try
                {
                    std::size_t pos = 0;
                    double v = std::stod(s, &pos);
                    if (pos != s.size() || !std::isfinite(v))
                        throw std::invalid_argument(s);
                    return v;
                }
                catch (const std::exception &)
                {
                    throw ConfigError(path, "expected a number, got '" + s + "'");
                }
            }

            void reject_unknown() const
            {
                for (const auto &sec : tree_)
                {
                    if (sec.second.empty() && !sec.second.data().empty())
                        throw ConfigError(sec.first, "key outside any section");
                    for (const auto &kv : sec.second)
                    {
                        const std::string path = sec.first + "." + kv.first;
                        if (!used_.count(path))
                            throw ConfigError(path, "unknown key");
                    }
                }
            }

        private:
            const pt::ptree &tree_;
            mutable std::set<std::string> used_;
        };

        pt::ptree read_ini(std::istream &is)
        {
            pt::ptree tree;
            try
            {
                pt::read_ini(is, tree);
            }
            catch (const pt::ini_parser_error &e)
            {
                throw ConfigError("", "malformed file: " + e.message() + " (line " + std::to_string(e.line()) + ")");
            }
            return tree;
        }

        std::vector<double> parse_snr(const std::string &path, const std::string &s)
        {
            std::vector<double> out;
            if (s.find(':') != std::string::npos)
            {
                auto p = split_list(s, ":");
                if (p.size() != 3)
                    throw ConfigError(path, "range must be start:step:stop");
                const double a = Reader::to_real(path, p[0]), step = Reader::to_real(path, p[1]),
                             b = Reader::to_real(path, p[2]);
                if (!(step > 0.0) || b < a)
                    throw ConfigError(path, "range needs step > 0 and stop >= start");
                const long n = std::lround(std::floor((b - a) / step + 1e-9));
                for (long i = 0; i <= n; ++i)
                    out.push_back(a + static_cast<double>(i) * step);
                return out;
            }
            for (const auto &v : split_list(s))
                out.push_back(Reader::to_real(path, v));
            return out;
        }

        std::string normalize_name(std::string s)
        {
            boost::algorithm::to_lower(s);
            boost::algorithm::replace_all(s, "-", "_");
            return s;
        }

        std::string file_dir(const std::string &path)
        {
            auto pos = path.find_last_of('/');
            return pos == std::string::npos ? "." : path.substr(0, pos == 0 ? 1 : pos);
        }

        template <class T, class F>
        T enum_value(const std::string &path, const std::string &s, F from)
        {
            try
            {
                return from(s);
            }
            catch (const std::invalid_argument &e)
            {
                throw ConfigError(path, e.what());
            }
        }
    }

    std::string to_string(Placement p)
    {
        switch (p)
        {
        case Placement::uniform_omega:
            return "uniform-omega";
        case Placement::uniform_angle:
            return "uniform-angle";
        case Placement::explicit_list:
            return "explicit";
        }
        return "?";
    }

    Placement placement_from_string(const std::string &s)
    {
        for (Placement p : {Placement::uniform_omega, Placement::uniform_angle, Placement::explicit_list})
            if (to_string(p) == s)
                return p;
        throw std::invalid_argument("unknown placement '" + s + "'");
    }

    std::string to_string(FilterKind k) { return k == FilterKind::bank ? "bank" : "nearfield"; }

    FilterKind filter_kind_from_string(const std::string &s)
    {
        if (s == "bank")
            return FilterKind::bank;
        if (s == "nearfield")
            return FilterKind::nearfield;
        throw std::invalid_argument("unknown filter kind '" + s + "'");
    }

    bool ScenarioConfig::operator==(const ScenarioConfig &o) const
    {
        return name == o.name && seed == o.seed && trials == o.trials && n_elements == o.n_elements &&
               carrier_hz == o.carrier_hz && spacing_m == o.spacing_m && n_users == o.n_users &&
               placement == o.placement && distance_m == o.distance_m && users == o.users && model == o.model &&
               beta0 == o.beta0 && nlos == o.nlos && scatterers_per_user == o.scatterers_per_user &&
               ring_radius_m == o.ring_radius_m && families == o.families && filter == o.filter &&
               filter_length == o.filter_length && bank_size == o.bank_size && hamming == o.hamming &&
               band_spec == o.band_spec && filter_file == o.filter_file &&
               decimation_interval == o.decimation_interval && decimation_offset == o.decimation_offset &&
               snr_db == o.snr_db && out_dir == o.out_dir;
    }

    ArrayGeometry ScenarioConfig::geometry() const
    {
        if (spacing_m > 0.0)
            return ArrayGeometry(n_elements, spacing_m, speed_of_light / carrier_hz);
        return ArrayGeometry::half_wavelength(n_elements, carrier_hz);
    }

    void ScenarioConfig::validate() const
    {
        if (trials < 1)
            throw ConfigError("scenario.trials", "must be at least 1");
        if (n_elements < 1 || n_elements % 2 == 0)
            throw ConfigError("array.n_elements", "must be odd and positive");
        if (!(carrier_hz > 0.0))
            throw ConfigError("array.carrier_hz", "must be positive");
        if (spacing_m < 0.0)
            throw ConfigError("array.spacing_m", "must be non-negative");
        if (n_users < 0)
            throw ConfigError("users.count", "must be non-negative");
        if (placement == Placement::explicit_list && static_cast<int>(users.size()) != n_users)
            throw ConfigError("users.explicit_r_m_theta_rad", "needs exactly users.count entries");
        if (placement != Placement::explicit_list && !(distance_m > 0.0))
            throw ConfigError("users.distance_m", "must be positive");
        for (const auto &u : users)
            if (!(u.distance_m > 0.0) || std::abs(u.angle_rad) > pi / 2)
                throw ConfigError("users.explicit_r_m_theta_rad", "need r > 0 and |theta| <= pi/2");
        if (!(beta0 > 0.0))
            throw ConfigError("channel.beta0", "must be positive");
        if (nlos && (scatterers_per_user < 1 || !(ring_radius_m > 0.0)))
            throw ConfigError("channel.scatterers_per_user", "one-ring model needs Q >= 1 and a positive radius");
        if (families.empty())
            throw ConfigError("receivers.families", "no receiver families listed");
        for (Family f : families)
        {
            const bool nf = f == Family::nf_cbs_mrc || f == Family::nf_cbs_mmse;
            const bool cbs = !nf && f != Family::mrc && f != Family::zf && f != Family::mmse;
            if (nf && filter != FilterKind::nearfield)
                throw ConfigError("receivers.families", to_string(f) + " needs filter.kind = nearfield");
            if (cbs && filter != FilterKind::bank)
                throw ConfigError("receivers.families", to_string(f) + " needs filter.kind = bank");
        }
        if (filter == FilterKind::bank)
        {
            if (filter_length < 1 || filter_length > n_elements)
                throw ConfigError("filter.length", "must lie in [1, N]");
            if (bank_size < 1)
                throw ConfigError("filter.bank_size", "must be at least 1");
        }
        else
        {
            if (band_spec.empty())
                throw ConfigError("filter.band_spec", "near-field filters need a band spec file");
            if (model == ChannelModel::far_field)
                throw ConfigError("channel.model", "near-field filters need a spherical-wave model");
        }
        if (decimation_interval < 1)
            throw ConfigError("receivers.decimation_interval", "must be at least 1");
        if (decimation_offset < 0 || decimation_offset >= decimation_interval)
            throw ConfigError("receivers.decimation_offset", "must lie in [0, decimation_interval)");
        if (snr_db.empty())
            throw ConfigError("snr.receive_db", "no SNR points");
    }

    ScenarioConfig parse_scenario(std::istream &is, const std::string &base_dir)
    {
        const pt::ptree tree = read_ini(is);
        Reader r(tree);
        ScenarioConfig c;
        c.base_dir = base_dir;
        c.name = r.str("scenario.name", c.name);
        c.seed = r.unsigned_integer("scenario.seed", c.seed);
        c.trials = static_cast<int>(r.integer("scenario.trials", c.trials));
        c.out_dir = r.str("scenario.out_dir", c.out_dir);

        c.n_elements = static_cast<int>(r.integer("array.n_elements", c.n_elements));
        c.carrier_hz = r.real("array.carrier_hz", c.carrier_hz);
        c.spacing_m = r.real("array.spacing_m", c.spacing_m);

        c.n_users = static_cast<int>(r.integer("users.count", c.n_users));
        c.placement = enum_value<Placement>("users.placement", r.str("users.placement", to_string(c.placement)),
                                            placement_from_string);
        c.distance_m = r.real("users.distance_m", c.distance_m);
        if (r.has("users.explicit_r_m_theta_rad"))
        {
            const std::string path = "users.explicit_r_m_theta_rad";
            for (const auto &entry : split_list(r.str(path, ""), ";"))
            {
                auto p = split_list(entry, " \t");
                if (p.size() != 2)
                    throw ConfigError(path, "entries are 'r theta' separated by ';'");
                c.users.push_back({Reader::to_real(path, p[0]), Reader::to_real(path, p[1])});
            }
        }

        c.model = enum_value<ChannelModel>("channel.model", normalize_name(r.str("channel.model", to_string(c.model))),
                                           channel_model_from_string);
        c.beta0 = r.real("channel.beta0", c.beta0);
        c.nlos = r.boolean("channel.nlos", c.nlos);
        c.scatterers_per_user = static_cast<int>(r.integer("channel.scatterers_per_user", c.scatterers_per_user));
        c.ring_radius_m = r.real("channel.ring_radius_m", c.ring_radius_m);

        c.filter = enum_value<FilterKind>("filter.kind", r.str("filter.kind", to_string(c.filter)), filter_kind_from_string);
        c.filter_length = static_cast<int>(r.integer("filter.length", c.filter_length));
        c.bank_size = static_cast<int>(r.integer("filter.bank_size", c.bank_size));
        {
            const std::string w = r.str("filter.window", c.hamming ? "hamming" : "rectangular");
            if (w != "hamming" && w != "rectangular")
                throw ConfigError("filter.window", "expected hamming or rectangular");
            c.hamming = w == "hamming";
        }
        c.band_spec = r.str("filter.band_spec", c.band_spec);
        c.filter_file = r.str("filter.filter_file", c.filter_file);

        for (const auto &f : split_list(r.str("receivers.families", "")))
            c.families.push_back(enum_value<Family>("receivers.families", normalize_name(f), family_from_string));
        c.decimation_interval = static_cast<int>(r.integer("receivers.decimation_interval", c.decimation_interval));
        c.decimation_offset = static_cast<int>(r.integer("receivers.decimation_offset", c.decimation_offset));

        c.snr_db = parse_snr("snr.receive_db", r.str("snr.receive_db", ""));
        r.reject_unknown();
        c.validate();
        return c;
    }

    ScenarioConfig load_scenario(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("", "cannot open " + path);
        return parse_scenario(in, file_dir(path));
    }

    std::string serialize_scenario(const ScenarioConfig &c)
    {
        std::ostringstream os;
        os << "[scenario]\nname = " << c.name << "\nseed = " << c.seed << "\ntrials = " << c.trials
           << "\nout_dir = " << c.out_dir << "\n\n";
        os << "[array]\nn_elements = " << c.n_elements << "\ncarrier_hz = " << num(c.carrier_hz)
           << "\nspacing_m = " << num(c.spacing_m) << "\n\n";
        os << "[users]\ncount = " << c.n_users << "\nplacement = " << to_string(c.placement)
           << "\ndistance_m = " << num(c.distance_m) << "\n";
        if (!c.users.empty())
        {
            os << "explicit_r_m_theta_rad = ";
            for (std::size_t i = 0; i < c.users.size(); ++i)
                os << (i ? "; " : "") << num(c.users[i].distance_m) << ' ' << num(c.users[i].angle_rad);
            os << "\n";
        }
        os << "\n[channel]\nmodel = " << to_string(c.model) << "\nbeta0 = " << num(c.beta0)
           << "\nnlos = " << (c.nlos ? "true" : "false") << "\nscatterers_per_user = " << c.scatterers_per_user
           << "\nring_radius_m = " << num(c.ring_radius_m) << "\n\n";
        os << "[filter]\nkind = " << to_string(c.filter) << "\nlength = " << c.filter_length
           << "\nbank_size = " << c.bank_size << "\nwindow = " << (c.hamming ? "hamming" : "rectangular") << "\n";
        if (!c.band_spec.empty())
            os << "band_spec = " << c.band_spec << "\n";
        if (!c.filter_file.empty())
            os << "filter_file = " << c.filter_file << "\n";
        os << "\n[receivers]\nfamilies = ";
        for (std::size_t i = 0; i < c.families.size(); ++i)
            os << (i ? ", " : "") << to_string(c.families[i]);
        os << "\ndecimation_interval = " << c.decimation_interval << "\ndecimation_offset = " << c.decimation_offset
           << "\n\n[snr]\nreceive_db = ";
        for (std::size_t i = 0; i < c.snr_db.size(); ++i)
            os << (i ? ", " : "") << num(c.snr_db[i]);
        os << "\n";
        return os.str();
    }

    BandSpecFile parse_band_spec(std::istream &is)
    {
        const pt::ptree tree = read_ini(is);
        Reader r(tree);
        BandSpecFile f;
        BandSpec &s = f.spec;
        f.name = r.str("filter.name", f.name);
        s.n_elements = static_cast<int>(r.integer("filter.n_elements", s.n_elements));
        s.filter_length = static_cast<int>(r.integer("filter.length", s.filter_length));
        s.carrier_hz = r.real("filter.carrier_hz", s.carrier_hz);
        s.beta0 = r.real("filter.beta0", s.beta0);
        f.design.taps = enum_value<TapStructure>("filter.taps", r.str("filter.taps", to_string(f.design.taps)),
                                                 tap_structure_from_string);

        s.r_c1 = Reader::to_real("passband.r_min_m", r.required("passband.r_min_m"));
        s.r_c2 = Reader::to_real("passband.r_max_m", r.required("passband.r_max_m"));
        s.omega_c1 = pi * Reader::to_real("passband.omega_min_pi", r.required("passband.omega_min_pi"));
        s.omega_c2 = pi * Reader::to_real("passband.omega_max_pi", r.required("passband.omega_max_pi"));
        s.eps1 = r.real("passband.floor", s.eps1);

        s.r_s1 = r.real("transition.r_min_m", s.r_c1);
        s.r_s2 = r.real("transition.r_max_m", s.r_c2);
        s.omega_s1 = pi * Reader::to_real("transition.omega_min_pi", r.required("transition.omega_min_pi"));
        s.omega_s2 = pi * Reader::to_real("transition.omega_max_pi", r.required("transition.omega_max_pi"));
        s.eps2 = r.real("transition.ceiling", s.eps2);
        f.design.grid.transition_guard = pi * r.real("transition.guard_pi", 0.0);

        DesignOptions &d = f.design;
        d.tol = r.real("design.tol", d.tol);
        d.max_iter = static_cast<int>(r.integer("design.max_iter", d.max_iter));
        d.max_feasibility_iter = static_cast<int>(r.integer("design.max_feasibility_iter", d.max_feasibility_iter));
        d.passband_margin = r.real("design.passband_margin", d.passband_margin);
        d.grid.fine_step = pi * r.real("design.fine_step_pi", 0.0);
        d.grid.coarse_step = pi * r.real("design.coarse_step_pi", 0.0);
        d.grid.edge_zone = pi * r.real("design.edge_zone_pi", d.grid.edge_zone / pi);
        d.grid.r_steps = static_cast<int>(r.integer("design.r_steps", d.grid.r_steps));
        d.solver.gap_tol = r.real("design.solver_gap_tol", d.solver.gap_tol);
        d.solver.abs_gap_tol = r.real("design.solver_abs_gap_tol", d.solver.abs_gap_tol);
        d.solver.max_iter = static_cast<int>(r.integer("design.solver_max_iter", d.solver.max_iter));
        f.verification_density = r.real("design.verification_density", f.verification_density);
        r.reject_unknown();

        try
        {
            s.validate();
        }
        catch (const std::invalid_argument &e)
        {
            throw ConfigError("passband", e.what());
        }
        if (!(d.passband_margin >= 1.0))
            throw ConfigError("design.passband_margin", "must be at least 1");
        if (!(f.verification_density >= 1.0))
            throw ConfigError("design.verification_density", "must be at least 1");
        if (d.max_iter < 1 || d.max_feasibility_iter < 0)
            throw ConfigError("design.max_iter", "iteration limits must be positive");
        if (!(d.grid.transition_guard >= 0.0))
            throw ConfigError("transition.guard_pi", "must be non-negative");
        return f;
    }

    BandSpecFile load_band_spec(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("", "cannot open " + path);
        return parse_band_spec(in);
    }

    std::string serialize_band_spec(const BandSpecFile &f)
    {
        const BandSpec &s = f.spec;
        const DesignOptions &d = f.design;
        std::ostringstream os;
        os << "[filter]\nname = " << f.name << "\nn_elements = " << s.n_elements << "\nlength = " << s.filter_length
           << "\ncarrier_hz = " << num(s.carrier_hz) << "\nbeta0 = " << num(s.beta0) << "\ntaps = " << to_string(d.taps)
           << "\n\n[passband]\nr_min_m = " << num(s.r_c1) << "\nr_max_m = " << num(s.r_c2)
           << "\nomega_min_pi = " << num(s.omega_c1 / pi) << "\nomega_max_pi = " << num(s.omega_c2 / pi)
           << "\nfloor = " << num(s.eps1) << "\n\n[transition]\nr_min_m = " << num(s.r_s1)
           << "\nr_max_m = " << num(s.r_s2) << "\nomega_min_pi = " << num(s.omega_s1 / pi)
           << "\nomega_max_pi = " << num(s.omega_s2 / pi) << "\nceiling = " << num(s.eps2)
           << "\nguard_pi = " << num(d.grid.transition_guard / pi) << "\n\n[design]\ntol = " << num(d.tol)
           << "\nmax_iter = " << d.max_iter << "\nmax_feasibility_iter = " << d.max_feasibility_iter
           << "\npassband_margin = " << num(d.passband_margin) << "\nfine_step_pi = " << num(d.grid.fine_step / pi)
           << "\ncoarse_step_pi = " << num(d.grid.coarse_step / pi) << "\nedge_zone_pi = " << num(d.grid.edge_zone / pi)
           << "\nr_steps = " << d.grid.r_steps << "\nsolver_gap_tol = " << num(d.solver.gap_tol)
           << "\nsolver_abs_gap_tol = " << num(d.solver.abs_gap_tol) << "\nsolver_max_iter = " << d.solver.max_iter
           << "\nverification_density = " << num(f.verification_density) << "\n";
        return os.str();
    }

    std::string config_hash(const std::string &text)
    {
        std::uint64_t h = 1469598103934665603ull; // FNV-1a
        for (unsigned char ch : text)
        {
            h ^= ch;
            h *= 1099511628211ull;
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }
}
