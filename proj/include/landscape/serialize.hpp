#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "landscape/geometry.hpp"
#include "landscape/net.hpp"
#include "landscape/spurious.hpp"
#include "landscape/verify.hpp"

namespace landscape {

// "%.17g": enough digits to round-trip any double, few enough to be stable.
std::string format_double(double v);

// JSON text with objects key-sorted and doubles at 17 significant digits, so
// a given report is byte-identical across runs and platforms.
std::string fixed_dump(const nlohmann::json& j, int indent = 2);

// --- config field access with path-carrying errors ---------------------

// Throws ConfigError naming `path` when obj is not a JSON object or has a
// key outside `allowed`.
void reject_unknown_fields(const nlohmann::json& obj, const std::vector<std::string>& allowed,
                           const std::string& path);
double get_double(const nlohmann::json& obj, const std::string& key, const std::string& path);
double get_double_or(const nlohmann::json& obj, const std::string& key, const std::string& path,
                     double fallback);
std::int64_t get_int(const nlohmann::json& obj, const std::string& key, const std::string& path);
std::int64_t get_int_or(const nlohmann::json& obj, const std::string& key,
                        const std::string& path, std::int64_t fallback);
std::string get_string(const nlohmann::json& obj, const std::string& key,
                       const std::string& path);
std::vector<double> get_double_array(const nlohmann::json& value, const std::string& path);

// --- domain values <-> JSON --------------------------------------------

// {"layers":[{"A":[[...]],"b":[...]}, ...]}
nlohmann::json parameters_to_json(const Parameters& params);
Parameters parameters_from_json(const Architecture& arch, const nlohmann::json& j,
                                const std::string& path);

nlohmann::json segment_to_json(const AffineSegment& segment);
AffineSegment segment_from_json(const nlohmann::json& j, const std::string& path);

// {"kind":"leaky_relu","slope":0.01} and friends; space-filling carries its
// base, interval and amplitude and is rebuilt on load.
nlohmann::json activation_to_json(const Activation& act);
Activation activation_from_json(const nlohmann::json& j, const std::string& path);

// {"input_dim":d,"widths":[...],"activations":[...]}; a single activation
// object is broadcast over all hidden layers.
nlohmann::json architecture_to_json(const Architecture& arch);
Architecture architecture_from_json(const nlohmann::json& j, const std::string& path);

nlohmann::json affine_map_to_json(const AffineMap& map);

// --- reports -------------------------------------------------------------

nlohmann::json construction_report(const SpuriousConstruction& construction,
                                   const FiniteMeasure& mu);
nlohmann::json local_min_report_json(const LocalMinReport& report);
nlohmann::json escape_report_json(const EscapeCertificate& certificate);
nlohmann::json projection_report_json(const ProjectionResult& result,
                                      const std::vector<double>& target);
nlohmann::json scan_report_json(const ScanResult& result);
nlohmann::json expressiveness_report_json(const ExpressivenessReport& report);

// --- CSV -------------------------------------------------------------------

struct Dataset {
    FiniteMeasure measure;
    Target target;
};

// Columns x1..xd,y[,weight]; missing weight column means uniform 1/n.
// Duplicate (x, y) rows merge; conflicting targets for one x are rejected.
Dataset parse_dataset_csv(std::istream& in, const std::string& name);
Dataset load_dataset_csv(const std::string& path);

void write_csv_row(std::ostream& out, const std::vector<double>& row);
// Rows with any |z| > 1000 are dropped unless `full` (they are off every
// reasonable plot and dwarf the axis scales otherwise).
void write_cloud_csv(std::ostream& out, const ImageCloud& cloud, bool full);
void write_space_fill_csv(std::ostream& out, const SpaceFillingActivation& act, int n);

} // namespace landscape
