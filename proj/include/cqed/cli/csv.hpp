// csv.hpp: CSV artifacts: header, 17-digit rows, '#' metadata trailer,
// written through a temporary file and renamed into place.

#pragma once

#include "../analysis.hpp"
#include "../errors.hpp"
#include "config.hpp"

#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#ifndef CQED_VERSION
#define CQED_VERSION "0.1.0"
#endif

namespace cqed::cli {

struct CsvArtifact {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, std::string>> trailer;

    void check() const {
        if (header.empty()) throw InvalidArgument("CsvArtifact: empty header");
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != header.size()) {
                throw InvalidArgument("CsvArtifact: row " + std::to_string(i) + " has " +
                                      std::to_string(rows[i].size()) + " fields, header has " +
                                      std::to_string(header.size()));
            }
            if (i > 0 && rows[i][0] < rows[i - 1][0]) {
                throw InvalidArgument("CsvArtifact: rows are not ordered by " + header[0]);
            }
        }
    }

    [[nodiscard]] std::string render() const {
        check();
        std::string out;
        for (std::size_t c = 0; c < header.size(); ++c) out += (c ? "," : "") + header[c];
        out += '\n';
        for (const auto& r : rows) {
            for (std::size_t c = 0; c < r.size(); ++c) {
                if (c) out += ',';
                out += format_real(r[c]);
            }
            out += '\n';
        }
        for (const auto& [k, v] : trailer) {
            std::string clean = v;
            for (char& ch : clean)
                if (ch == '\n' || ch == '\r') ch = ' ';
            out += "# " + k + " = " + clean + "\n";
        }
        return out;
    }
};

inline CsvArtifact make_artifact(const analysis::SweepResult& r, const JobConfig& cfg) {
    CsvArtifact a;
    a.header = r.columns;
    a.rows = r.rows;
    a.trailer.emplace_back("version", CQED_VERSION);
    a.trailer.emplace_back("job", job_name(cfg.job));
    a.trailer.emplace_back("model", cfg.model);
    a.trailer.emplace_back("config_hash", config_hash(cfg));
    a.trailer.emplace_back("n_fock", std::to_string(cfg.n_fock));
    a.trailer.emplace_back("fast", cfg.fast ? "true" : "false");
    a.trailer.emplace_back("tolerance.config", format_real(cfg.tolerance));
    a.trailer.emplace_back("tolerance.hermiticity", format_real(kHermiticityTolerance));
    a.trailer.emplace_back("tolerance.degeneracy", format_real(analysis::kDegeneracyTolerance));
    a.trailer.emplace_back("tolerance.displacement", format_real(kDisplacementTolerance));
    for (const auto& [k, v] : r.metadata) a.trailer.emplace_back("meta." + k, v);
    a.trailer.emplace_back("failures", std::to_string(r.failures.size()));
    for (std::size_t i = 0; i < r.failures.size(); ++i) {
        const auto& f = r.failures[i];
        a.trailer.emplace_back("failure." + std::to_string(i),
                               r.axis + "=" + format_real(f.axis_value) + " " + category_name(f.category) + ": " +
                                   f.message);
    }
    return a;
}

// Writes `content` to `<path>.tmp` beside the target, then renames it over
// the target. A failure leaves any previous file untouched.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path parent = path.parent_path();
    if (!parent.empty() && !fs::is_directory(parent)) {
        throw IoError("output directory '" + parent.string() + "' does not exist");
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open '" + tmp.string() + "' for writing");
        os.write(content.data(), static_cast<std::streamsize>(content.size()));
        os.flush();
        if (!os) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError("write to '" + tmp.string() + "' failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        std::error_code ignore;
        fs::remove(tmp, ignore);
        throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
    }
}

} // namespace cqed::cli
