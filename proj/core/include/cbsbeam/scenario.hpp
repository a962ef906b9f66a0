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
#ifndef CBSBEAM_SCENARIO_HPP
#define CBSBEAM_SCENARIO_HPP

#include "cbsbeam/array_model.hpp"
#include "cbsbeam/band_spec.hpp"
#include "cbsbeam/beamformers.hpp"
#include "cbsbeam/nearfield_design.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace cbs
{
    enum class Placement
    {
        uniform_omega, // omega ~ U[-pi, pi] at distance_m
        uniform_angle, // theta ~ U[-pi/2, pi/2] at distance_m
        explicit_list
    };

    std::string to_string(Placement p);
    Placement placement_from_string(const std::string &s);

    enum class FilterKind
    {
        bank,     // M window-method filters tiling [0, pi]
        nearfield // one designed filter with a near-field band set
    };

    std::string to_string(FilterKind k);
    FilterKind filter_kind_from_string(const std::string &s);

    // INI file, one section per group; every dimensional key carries its unit.
    struct ScenarioConfig
    {
        std::string name = "scenario";
        std::uint64_t seed = 1;
        int trials = 1;

        int n_elements = 65;
        double carrier_hz = 3e9;
        double spacing_m = 0.0; // 0 means half a wavelength

        int n_users = 0;
        Placement placement = Placement::uniform_omega;
        double distance_m = 200.0;
        std::vector<UserLocation> users; // explicit_list only

        ChannelModel model = ChannelModel::far_field;
        double beta0 = 1.0;
        bool nlos = false; // one-ring multipath on top of LoS
        int scatterers_per_user = 3;
        double ring_radius_m = 5.0;

        std::vector<Family> families;
        FilterKind filter = FilterKind::bank;
        int filter_length = 14;
        int bank_size = 1;
        bool hamming = false;
        std::string band_spec;   // near-field band spec file
        std::string filter_file; // near-field taps; designed from band_spec when empty
        int decimation_interval = 1;
        int decimation_offset = 0;

        std::vector<double> snr_db; // receive SNR per element

        std::string out_dir = ".";
        std::string base_dir; // relative paths resolve against this; not serialized

        bool operator==(const ScenarioConfig &o) const;
        void validate() const; // throws ConfigError
        ArrayGeometry geometry() const;
    };

    ScenarioConfig parse_scenario(std::istream &is, const std::string &base_dir = ".");
    ScenarioConfig load_scenario(const std::string &path);
    std::string serialize_scenario(const ScenarioConfig &cfg);

    // Band spec file: band edges in units of pi, thresholds, and design options.
    struct BandSpecFile
    {
        std::string name = "filter";
        BandSpec spec;
        DesignOptions design;
        double verification_density = 4.0;
    };

    BandSpecFile parse_band_spec(std::istream &is);
    BandSpecFile load_band_spec(const std::string &path);
    std::string serialize_band_spec(const BandSpecFile &f);

    std::string config_hash(const std::string &text); // 16 hex digits

    struct TrialRow
    {
        Family family = Family::mrc;
        double snr_db = 0.0;
        int trial = 0;
        double sum_rate = 0.0;
        double mean_sinr_db = 0.0;     // over served users
        double passband_sinr_db = 0.0; // over the scenario's passband users
        int served = 0;
        std::uint64_t multiply_analytic = 0;
        std::uint64_t multiply_measured = 0;
        std::string status = "ok";
        RVector sinr;
    };

    struct SummaryRow
    {
        Family family = Family::mrc;
        double snr_db = 0.0;
        int trials_ok = 0;
        double mean_sum_rate = 0.0;
        double std_sum_rate = 0.0;
        double mean_passband_sinr_db = 0.0;
        std::uint64_t multiply_analytic = 0;
    };

    struct ScenarioResult
    {
        std::vector<TrialRow> rows; // ordered by trial, family, snr
        std::vector<SummaryRow> summary;
        std::vector<std::vector<UserLocation>> users; // per trial
        std::vector<std::vector<int>> passband;       // per trial
        std::string config_hash;
        std::vector<std::string> files;
    };

    struct RunOptions
    {
        int threads = 1;
        bool write_files = true;
        std::string out_dir; // overrides the config when non-empty
    };

    // Every family and SNR point of a trial share one channel draw. A family that fails
    // is recorded with its error in the status column and the others still run.
    ScenarioResult run_scenario(const ScenarioConfig &cfg, const RunOptions &opt = {});

    struct DesignRun
    {
        FirFilter filter;
        ScaState state;
        DesignProfile profile;
        std::vector<std::string> files;
        double seconds = 0.0;
    };

    // Writes <name>.filter, <name>_design.json and <name>_profile.csv into out_dir.
    DesignRun run_filter_design(const BandSpecFile &spec, const std::string &out_dir, bool write_files = true);

    // One "x y" file per curve plus <tag>_manifest.txt. Tags: sum-rate, sinr (scenario reports), sca (design reports).
    std::vector<std::string> export_plotdata(const std::string &report_path, const std::string &tag,
                                             const std::string &out_dir);
}

#endif
