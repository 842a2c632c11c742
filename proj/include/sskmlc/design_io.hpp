/*
On-disk formats: the JSON design file produced by the design mode and
consumed by the BER mode, the JSON capacity report, and the versioned CSV
emitters. Index sets are stored 0-based.
*/
#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sskmlc/ber.hpp"
#include "sskmlc/capacity.hpp"
#include "sskmlc/construction.hpp"
#include "sskmlc/errors.hpp"
#include "sskmlc/mlc_link.hpp"

namespace sskmlc {

inline constexpr int design_file_version = 1;

struct DesignFile {
    int version = design_file_version;
    int nt = 0;
    int nr = 0;
    double dsnr_db = 0.0;
    std::uint64_t seed = 0;
    std::vector<PolarCodeSpec> levels;
    PolarCodeSpec bicm_code;
    std::uint64_t interleaver_seed = 0;

    int component_length() const { return levels.empty() ? 0 : levels.front().block_length; }
    int total_info() const
    {
        int k = 0;
        for (const auto& spec : levels) k += spec.info_count();
        return k;
    }

    MlcSystemSpec mlc_system(double es_n0_db) const
    {
        return {SskConfig(nt, nr, es_n0_db), levels};
    }
    BicmSystemSpec bicm_system(double es_n0_db) const
    {
        return {SskConfig(nt, nr, es_n0_db), bicm_code, interleaver_seed};
    }
};

inline nlohmann::json to_json(const DesignFile& design)
{
    nlohmann::json levels = nlohmann::json::array();
    for (const auto& spec : design.levels)
        levels.push_back({{"n_exp", spec.n}, {"K", spec.info_count()}, {"info_set", spec.info_set}});
    return {
        {"version", design.version},
        {"ssk", {{"nt", design.nt}, {"nr", design.nr}}},
        {"dsnr_db", design.dsnr_db},
        {"seed", design.seed},
        {"levels", levels},
        {"bicm",
         {{"K", design.bicm_code.info_count()},
          {"info_set", design.bicm_code.info_set},
          {"interleaver_seed", design.interleaver_seed}}},
    };
}

inline DesignFile design_from_json(const nlohmann::json& j)
{
    DesignFile design;
    try {
        design.version = j.at("version").get<int>();
        if (design.version != design_file_version)
            throw std::invalid_argument("design file: unsupported version " +
                                        std::to_string(design.version));
        design.nt = j.at("ssk").at("nt").get<int>();
        design.nr = j.at("ssk").at("nr").get<int>();
        design.dsnr_db = j.at("dsnr_db").get<double>();
        design.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& level : j.at("levels")) {
            PolarCodeSpec spec(level.at("n_exp").get<int>(),
                               level.at("info_set").get<std::vector<int>>());
            if (spec.info_count() != level.at("K").get<int>())
                throw std::invalid_argument("design file: level K does not match its info_set");
            design.levels.push_back(std::move(spec));
        }
        const auto& bicm = j.at("bicm");
        int total_exp = 0;
        while ((1 << total_exp) < design.component_length() * int(design.levels.size())) ++total_exp;
        design.bicm_code =
            PolarCodeSpec(total_exp, bicm.at("info_set").get<std::vector<int>>());
        if (design.bicm_code.info_count() != bicm.at("K").get<int>())
            throw std::invalid_argument("design file: bicm K does not match its info_set");
        design.interleaver_seed = bicm.at("interleaver_seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("design file: ") + e.what());
    }
    SskConfig sanity(design.nt, design.nr, 0.0); // validates antenna counts
    if (int(design.levels.size()) != sanity.bits_per_symbol())
        throw std::invalid_argument("design file: level count != log2(nt)");
    for (const auto& spec : design.levels)
        if (spec.block_length != design.component_length())
            throw std::invalid_argument("design file: level lengths differ");
    if (design.bicm_code.block_length != design.component_length() * int(design.levels.size()))
        throw std::invalid_argument("design file: bicm code length != m_a*N");
    if (design.bicm_code.info_count() != design.total_info())
        throw std::invalid_argument("design file: bicm K != sum of level K");
    return design;
}

inline void save_design(const DesignFile& design, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << to_json(design).dump(2) << '\n';
    if (!out) throw IoError("write failed on '" + path + "'");
}

inline DesignFile load_design(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open design file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("design file '" + path + "': " + e.what());
    }
    return design_from_json(j);
}

inline nlohmann::json to_json(const CapacityReport& report)
{
    return {
        {"nt", report.config.transmit_antennas},
        {"nr", report.config.receive_antennas},
        {"es_n0_db", report.config.es_n0_db},
        {"frames", report.frames},
        {"seed", report.seed},
        {"total_capacity", report.total_capacity},
        {"total_std_error", report.total_std_error},
        {"subset_capacity", report.subset_capacity},
        {"subset_std_error", report.subset_std_error},
        {"level_capacity", report.level_capacity},
        {"level_std_error", report.level_std_error},
        {"per_label", report.per_label},
    };
}

// Fixed-width float formatting keeps CSV output byte-stable.
inline std::string csv_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& schema_comment) : out_(path)
    {
        if (!out_) throw IoError("cannot open '" + path + "' for writing");
        out_ << "# " << schema_comment << '\n';
        out_.flush();
    }

    void row(const std::vector<std::string>& fields)
    {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << fields[i];
        }
        out_ << '\n';
        out_.flush(); // completed rows survive a mid-sweep kill
        if (!out_) throw IoError("write failed");
    }

private:
    std::ofstream out_;
};

inline std::string capacity_csv_schema(int levels)
{
    std::string s = "capacity-csv v1: es_n0_db,c_total";
    for (int i = 1; i <= levels; ++i) s += ",c" + std::to_string(i);
    s += ",se_total";
    for (int i = 1; i <= levels; ++i) s += ",se" + std::to_string(i);
    return s;
}

inline std::vector<std::string> capacity_csv_row(const CapacityReport& report)
{
    std::vector<std::string> fields;
    fields.push_back(csv_double(report.config.es_n0_db));
    fields.push_back(csv_double(report.total_capacity));
    for (double c : report.level_capacity) fields.push_back(csv_double(c));
    fields.push_back(csv_double(report.total_std_error));
    for (double se : report.level_std_error) fields.push_back(csv_double(se));
    return fields;
}

inline constexpr const char* ber_csv_schema =
    "ber-csv v1: arm,es_n0_db,frames,bit_errors,frame_errors,ber,fer";

inline std::vector<std::string> ber_csv_row(const BerRecord& rec)
{
    return {rec.arm,
            csv_double(rec.es_n0_db),
            std::to_string(rec.frames),
            std::to_string(rec.bit_errors),
            std::to_string(rec.frame_errors),
            csv_double(rec.ber),
            csv_double(rec.fer)};
}

} // namespace sskmlc
