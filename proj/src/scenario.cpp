#include "rislink/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "rislink/error.hpp"

namespace rislink {

std::string Diagnostic::format() const {
    std::ostringstream os;
    if (line > 0) {
        os << "line " << line;
        if (column > 0) {
            os << ", column " << column;
        }
        os << ": ";
    }
    if (!section.empty()) {
        os << '[' << section << ']';
        if (!key.empty()) {
            os << ' ' << key;
        }
        os << ": ";
    }
    os << message;
    return os.str();
}

namespace {

std::string join_diagnostics(const std::vector<Diagnostic>& ds) {
    std::string out = std::to_string(ds.size()) + " scenario error(s)";
    for (const auto& d : ds) {
        out += "\n  " + d.format();
    }
    return out;
}

} // namespace

ScenarioError::ScenarioError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(join_diagnostics(diagnostics)), diagnostics_(std::move(diagnostics)) {}

std::string format_number(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, r.ptr};
}

std::vector<double> Sweep::values() const {
    std::vector<double> out;
    const double span = stop_m - start_m;
    const auto steps = static_cast<long>(std::floor(span / step_m + 1e-9));
    for (long i = 0; i <= steps; ++i) {
        out.push_back(start_m + static_cast<double>(i) * step_m);
    }
    return out;
}

std::vector<double> Experiment::snr_grid_db() const {
    std::vector<double> out;
    const auto steps = static_cast<long>(std::floor((snr_stop_db - snr_start_db) / snr_step_db + 1e-9));
    for (long i = 0; i <= steps; ++i) {
        out.push_back(snr_start_db + static_cast<double>(i) * snr_step_db);
    }
    return out;
}

namespace {

struct Entry {
    std::string key;
    std::string value;
    int line = 0;
    int column = 0; ///< of the value
    bool used = false;
};

struct Section {
    std::string name;
    int line = 0;
    std::vector<Entry> entries;
};

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) {
        ++b;
    }
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) {
        --e;
    }
    return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

const std::set<std::string> kSections{"geometry", "ris", "channel", "pathloss", "impairments", "experiment"};

class Parser {
public:
    std::vector<Diagnostic> diags;

    std::vector<Section> tokenize(std::string_view text) {
        std::vector<Section> sections;
        int line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const std::size_t nl = text.find('\n', pos);
            std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
            pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
            ++line_no;
            std::string_view content = raw;
            if (const auto hash = content.find('#'); hash != std::string_view::npos) {
                content = content.substr(0, hash);
            }
            const std::string line = trim(content);
            if (line.empty()) {
                continue;
            }
            const int indent = static_cast<int>(raw.find_first_not_of(" \t")) + 1;
            if (line.front() == '[') {
                if (line.back() != ']') {
                    error(line_no, indent + static_cast<int>(line.size()), "", "", "section header is missing ']'");
                    continue;
                }
                const std::string name = lower(trim(std::string_view(line).substr(1, line.size() - 2)));
                if (!kSections.contains(name)) {
                    error(line_no, indent + 1, name, "", "unknown section");
                    sections.push_back({"", line_no, {}});
                    continue;
                }
                if (name != "ris") {
                    for (const auto& s : sections) {
                        if (s.name == name) {
                            error(line_no, indent, name, "", "section appears more than once (first at line " +
                                                                 std::to_string(s.line) + ")");
                        }
                    }
                }
                sections.push_back({name, line_no, {}});
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                error(line_no, indent, "", "", "expected 'key = value' or '[section]'");
                continue;
            }
            if (sections.empty()) {
                error(line_no, indent, "", "", "key outside of any section");
                continue;
            }
            Entry e;
            e.key = lower(trim(std::string_view(line).substr(0, eq)));
            e.value = trim(std::string_view(line).substr(eq + 1));
            e.line = line_no;
            e.column = indent + static_cast<int>(eq) + 2;
            if (e.key.empty()) {
                error(line_no, indent, sections.back().name, "", "empty key");
                continue;
            }
            if (e.value.empty()) {
                error(line_no, e.column, sections.back().name, e.key, "missing value");
                continue;
            }
            auto& entries = sections.back().entries;
            const bool duplicate = std::any_of(entries.begin(), entries.end(),
                                               [&](const Entry& x) { return x.key == e.key; });
            if (duplicate) {
                error(line_no, indent, sections.back().name, e.key, "key given more than once in this section");
                continue;
            }
            entries.push_back(std::move(e));
        }
        return sections;
    }

    void error(int line, int column, std::string section, std::string key, std::string message) {
        diags.push_back({line, column, std::move(section), std::move(key), std::move(message)});
    }

    void error_at(const Section& s, const Entry& e, std::string message) {
        error(e.line, e.column, s.name, e.key, std::move(message));
    }
};

/// Splits "<number> <unit>" and checks the unit against an allowed list.
struct Quantity {
    double value = 0.0;
    std::string unit;
};

std::optional<double> parse_double(std::string_view s) {
    s = std::string_view(s).substr(s.find_first_not_of(' ') == std::string_view::npos ? s.size()
                                                                                      : s.find_first_not_of(' '));
    double v = 0.0;
    const char* first = s.data();
    if (!s.empty() && s.front() == '+') {
        ++first;
    }
    const auto r = std::from_chars(first, s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

std::optional<Quantity> split_quantity(const std::string& text) {
    std::size_t i = 0;
    while (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.' ||
                               text[i] == '-' || text[i] == '+' ||
                               ((text[i] == 'e' || text[i] == 'E') && i > 0 &&
                                i + 1 < text.size() &&
                                (std::isdigit(static_cast<unsigned char>(text[i + 1])) || text[i + 1] == '-' ||
                                 text[i + 1] == '+')))) {
        ++i;
    }
    const auto v = parse_double(std::string_view(text).substr(0, i));
    if (!v) {
        return std::nullopt;
    }
    return Quantity{*v, lower(trim(std::string_view(text).substr(i)))};
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

const std::map<std::string, Topology> kTopologies{
    {"single_ris", Topology::SingleRis},
    {"dual_simultaneous", Topology::DualSimultaneous},
    {"double_reflected", Topology::DoubleReflected},
    {"selection_indoor", Topology::SelectionIndoor},
    {"selection_outdoor", Topology::SelectionOutdoor},
    {"direct_only", Topology::DirectOnly},
};

const std::map<std::string, PathLossLaw> kLaws{
    {"radar_range", PathLossLaw::RadarRangeRIS},
    {"umi_3gpp_los", PathLossLaw::Umi3gppLos},
    {"umi_3gpp_nlos", PathLossLaw::Umi3gppNlos},
    {"umi_street_canyon_los", PathLossLaw::UmiStreetCanyonLos},
    {"umi_street_canyon_nlos", PathLossLaw::UmiStreetCanyonNlos},
    {"log_distance", PathLossLaw::LogDistance},
};

const std::map<std::string, ExperimentKind> kKinds{
    {"ber", ExperimentKind::Ber},
    {"rate", ExperimentKind::Rate},
    {"sep", ExperimentKind::Sep},
};

const char* kind_name(ExperimentKind k) {
    switch (k) {
    case ExperimentKind::Ber: return "ber";
    case ExperimentKind::Rate: return "rate";
    case ExperimentKind::Sep: return "sep";
    }
    return "ber";
}

std::optional<ModulationScheme> parse_modulation(const std::string& v) {
    const std::string s = lower(v);
    if (s == "bpsk") {
        return ModulationScheme::bpsk();
    }
    if (s == "qpsk") {
        return ModulationScheme{ModulationFamily::PSK, 4};
    }
    for (const auto& [suffix, family] : {std::pair{std::string("psk"), ModulationFamily::PSK},
                                         std::pair{std::string("qam"), ModulationFamily::QAM}}) {
        if (s.size() > suffix.size() && s.ends_with(suffix)) {
            int m = 0;
            const auto r = std::from_chars(s.data(), s.data() + s.size() - suffix.size(), m);
            if (r.ec == std::errc() && r.ptr == s.data() + s.size() - suffix.size()) {
                ModulationScheme scheme{family, m};
                try {
                    scheme.validate();
                    return scheme;
                } catch (const DomainError&) {
                    return std::nullopt;
                }
            }
        }
    }
    return std::nullopt;
}

/// Reads typed values out of one section, recording diagnostics on failure.
class SectionReader {
public:
    SectionReader(Parser& p, Section& s) : p_(p), s_(s) {}

    Entry* find(const std::string& key) {
        for (auto& e : s_.entries) {
            if (e.key == key) {
                e.used = true;
                return &e;
            }
        }
        return nullptr;
    }

    void missing(const std::string& key) {
        p_.error(s_.line, 0, s_.name, key, "required key is missing");
    }

    std::optional<std::string> text(const std::string& key, bool required = false) {
        Entry* e = find(key);
        if (!e) {
            if (required) {
                missing(key);
            }
            return std::nullopt;
        }
        return e->value;
    }

    /// Value in the first listed unit after conversion. Conversions are keyed by unit name.
    std::optional<double> quantity(const std::string& key, const std::map<std::string, double (*)(double)>& units,
                                   bool required = false) {
        Entry* e = find(key);
        if (!e) {
            if (required) {
                missing(key);
            }
            return std::nullopt;
        }
        return convert(*e, e->value, units);
    }

    std::optional<double> convert(const Entry& e, const std::string& text,
                                  const std::map<std::string, double (*)(double)>& units) {
        const auto q = split_quantity(text);
        if (!q) {
            p_.error_at(s_, e, "'" + text + "' is not a number");
            return std::nullopt;
        }
        if (q->unit.empty()) {
            p_.error_at(s_, e, "'" + text + "' needs a unit suffix (" + unit_list(units) + ")");
            return std::nullopt;
        }
        const auto it = units.find(q->unit);
        if (it == units.end()) {
            p_.error_at(s_, e, "unit '" + q->unit + "' does not fit here; expected " + unit_list(units));
            return std::nullopt;
        }
        return it->second(q->value);
    }

    std::optional<double> plain(const std::string& key, bool required = false) {
        Entry* e = find(key);
        if (!e) {
            if (required) {
                missing(key);
            }
            return std::nullopt;
        }
        const auto v = parse_double(e->value);
        if (!v) {
            p_.error_at(s_, *e, "'" + e->value + "' is not a plain number (this key takes no unit)");
        }
        return v;
    }

    std::optional<std::uint64_t> integer(const std::string& key, std::uint64_t min_value, bool required = false) {
        Entry* e = find(key);
        if (!e) {
            if (required) {
                missing(key);
            }
            return std::nullopt;
        }
        std::uint64_t v = 0;
        const auto r = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
        if (r.ec != std::errc() || r.ptr != e->value.data() + e->value.size()) {
            // allow 1e6-style literals for large counts
            const auto d = parse_double(e->value);
            if (!d || *d < 0 || *d != std::floor(*d) || *d > 1e18) {
                p_.error_at(s_, *e, "'" + e->value + "' is not a non-negative integer");
                return std::nullopt;
            }
            v = static_cast<std::uint64_t>(*d);
        }
        if (v < min_value) {
            p_.error_at(s_, *e, "must be at least " + std::to_string(min_value));
            return std::nullopt;
        }
        return v;
    }

    void reject_unknown() {
        for (const auto& e : s_.entries) {
            if (!e.used) {
                p_.error(e.line, 1, s_.name, e.key, "unknown key");
            }
        }
    }

    Section& section() { return s_; }
    Parser& parser() { return p_; }

private:
    static std::string unit_list(const std::map<std::string, double (*)(double)>& units) {
        std::string out;
        for (const auto& [name, fn] : units) {
            out += (out.empty() ? "" : ", ") + name;
        }
        return out;
    }

    Parser& p_;
    Section& s_;
};

double identity(double v) { return v; }
double from_db(double v) { return std::pow(10.0, v / 10.0); }
double from_dbm(double v) { return std::pow(10.0, (v - 30.0) / 10.0); }
double from_mw(double v) { return v * 1e-3; }
double from_mhz(double v) { return v * 1e-3; }
double from_rad(double v) { return v * 180.0 / 3.14159265358979323846; }

const std::map<std::string, double (*)(double)> kLength{{"m", identity}};
const std::map<std::string, double (*)(double)> kFrequency{{"ghz", identity}, {"mhz", from_mhz}};
const std::map<std::string, double (*)(double)> kPower{{"w", identity}, {"mw", from_mw}, {"dbm", from_dbm}};
const std::map<std::string, double (*)(double)> kRatio{{"db", from_db}, {"lin", identity}};
const std::map<std::string, double (*)(double)> kDecibel{{"db", identity}};
const std::map<std::string, double (*)(double)> kAngle{{"deg", identity}, {"rad", from_rad}};

void read_geometry(SectionReader& r, ScenarioFile& out) {
    Parser& p = r.parser();
    if (auto t = r.text("topology", true)) {
        const auto it = kTopologies.find(lower(*t));
        if (it == kTopologies.end()) {
            p.error_at(r.section(), *r.find("topology"), "unknown topology '" + *t + "'");
        } else {
            out.geometry.topology = it->second;
        }
    }
    auto& g = out.geometry;
    for (auto& e : r.section().entries) {
        const bool is_node = e.key == "s" || e.key == "d" ||
                             (e.key.size() > 1 && e.key[0] == 'r' &&
                              std::all_of(e.key.begin() + 1, e.key.end(), [](char c) { return std::isdigit(c); }));
        if (!is_node) {
            continue;
        }
        e.used = true;
        const auto parts = split(e.value, ',');
        if (parts.size() != 2 && parts.size() != 3) {
            p.error_at(r.section(), e, "a position needs 2 or 3 coordinates");
            continue;
        }
        std::array<double, 3> xyz{0.0, 0.0, 0.0};
        bool ok = true;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            const auto v = r.convert(e, parts[i], kLength);
            ok = ok && v.has_value();
            if (v) {
                xyz[i] = *v;
            }
        }
        if (ok) {
            std::string name = e.key;
            name[0] = static_cast<char>(std::toupper(name[0]));
            g.positions[name] = {xyz[0], xyz[1], xyz[2]};
        }
    }
    auto list = [&](const std::string& key, std::vector<double>& dst) {
        if (Entry* e = r.find(key)) {
            for (const auto& part : split(e->value, ',')) {
                if (auto v = r.convert(*e, part, kLength)) {
                    dst.push_back(*v);
                }
            }
        }
    };
    if (auto v = r.quantity("d_sd", kLength)) {
        g.d_sd = *v;
    }
    list("d_sr", g.d_sr);
    list("d_rd", g.d_rd);
    if (Entry* e = r.find("d_rr")) {
        for (const auto& row : split(e->value, ';')) {
            std::vector<double> values;
            for (const auto& part : split(row, ',')) {
                if (auto v = r.convert(*e, part, kLength)) {
                    values.push_back(*v);
                }
            }
            g.d_rr.push_back(std::move(values));
        }
    }
    if (auto n = r.integer("near_source_count", 1)) {
        g.near_source_count = *n;
    }
    r.reject_unknown();
}

void read_ris(SectionReader& r, ScenarioFile& out) {
    RisPanel panel;
    if (auto n = r.integer("elements", 1, true)) {
        panel.element_count = *n;
    }
    if (auto g = r.quantity("gamma", kDecibel)) {
        panel.gamma_mag_db = *g;
    }
    out.panels.push_back(panel);
    r.reject_unknown();
}

void read_channel(SectionReader& r, ScenarioFile& out, bool power_required) {
    if (auto f = r.text("fading")) {
        const std::string v = lower(*f);
        if (v == "rician") {
            out.fading = true;
        } else if (v == "none") {
            out.fading = false;
        } else {
            r.parser().error_at(r.section(), *r.find("fading"), "fading must be 'rician' or 'none'");
        }
    }
    if (auto k = r.quantity("k_factor", kRatio)) {
        out.k_factor = *k;
    }
    if (auto p = r.quantity("p_t", kPower, power_required)) {
        out.p_t_w = *p;
    }
    if (auto n = r.quantity("n0", kPower, power_required)) {
        out.n0_w = *n;
    }
    r.reject_unknown();
}

void read_pathloss(SectionReader& r, ScenarioFile& out) {
    Parser& p = r.parser();
    auto law = [&](const std::string& key, bool required) -> std::optional<PathLossLaw> {
        auto t = r.text(key, required);
        if (!t) {
            return std::nullopt;
        }
        const auto it = kLaws.find(lower(*t));
        if (it == kLaws.end()) {
            p.error_at(r.section(), *r.find(key), "unknown path-loss law '" + *t + "'");
            return std::nullopt;
        }
        return it->second;
    };
    if (auto l = law("law", true)) {
        out.pathloss.law = *l;
    }
    out.direct_law = law("direct_law", false);
    if (auto f = r.quantity("carrier", kFrequency, true)) {
        out.pathloss.carrier_ghz = *f;
    }
    if (auto g = r.quantity("gain_incident", kRatio)) {
        out.pathloss.ris_gains.incident = *g;
    }
    if (auto g = r.quantity("gain_reflect", kRatio)) {
        out.pathloss.ris_gains.reflect = *g;
    }
    if (auto e = r.plain("efficiency")) {
        out.pathloss.efficiency = *e;
    }
    if (auto d = r.quantity("reference_distance", kLength)) {
        out.pathloss.reference.d0_m = *d;
    }
    if (auto l = r.quantity("reference_loss", kDecibel)) {
        out.pathloss.reference.pl0_db = *l;
    }
    if (auto n = r.plain("exponent")) {
        out.pathloss.reference.exponent = *n;
    }
    if (auto ph = r.text("phases")) {
        const std::string v = lower(*ph);
        if (v == "aligned") {
            out.realizable_phases = false;
        } else if (v == "realizable") {
            out.realizable_phases = true;
        } else {
            p.error_at(r.section(), *r.find("phases"), "phases must be 'aligned' or 'realizable'");
        }
    }
    r.reject_unknown();
}

void read_impairments(SectionReader& r, ScenarioFile& out) {
    Parser& p = r.parser();
    std::optional<phase::RangeLimited> range;
    if (Entry* e = r.find("phase_range")) {
        const auto parts = split(e->value, ',');
        if (parts.size() != 2) {
            p.error_at(r.section(), *e, "phase_range needs two angles: min, max");
        } else {
            const auto lo = r.convert(*e, parts[0], kAngle);
            const auto hi = r.convert(*e, parts[1], kAngle);
            if (lo && hi) {
                range = phase::RangeLimited{*lo, *hi, 0.0};
            }
        }
    }
    if (auto g = r.quantity("range_gamma", kDecibel)) {
        if (range) {
            range->gamma_mag_db = *g;
        } else if (r.find("phase_range") == nullptr) {
            p.error_at(r.section(), *r.find("range_gamma"), "range_gamma needs phase_range");
        }
    }
    if (range) {
        out.policy.stages.emplace_back(*range);
    }
    if (auto b = r.integer("quantization_bits", 1)) {
        out.policy.stages.emplace_back(phase::Quantized{static_cast<int>(*b)});
    }
    if (auto k = r.plain("von_mises_kappa")) {
        out.policy.stages.emplace_back(phase::VonMisesError{*k});
    }
    try {
        out.policy.validate();
    } catch (const DomainError& ex) {
        p.error(r.section().line, 0, "impairments", "", ex.what());
    }
    r.reject_unknown();
}

void read_experiment(SectionReader& r, ScenarioFile& out) {
    Parser& p = r.parser();
    auto& x = out.experiment;
    if (auto k = r.text("kind", true)) {
        const auto it = kKinds.find(lower(*k));
        if (it == kKinds.end()) {
            p.error_at(r.section(), *r.find("kind"), "kind must be ber, rate or sep");
        } else {
            x.kind = it->second;
        }
    }
    if (auto m = r.text("modulation")) {
        if (auto scheme = parse_modulation(*m)) {
            x.modulation = *scheme;
        } else {
            p.error_at(r.section(), *r.find("modulation"), "unknown modulation '" + *m + "'");
        }
    }
    const bool needs_grid = x.kind != ExperimentKind::Rate;
    if (auto v = r.quantity("snr_start", kDecibel, needs_grid)) {
        x.snr_start_db = *v;
    }
    if (auto v = r.quantity("snr_stop", kDecibel, needs_grid)) {
        x.snr_stop_db = *v;
    }
    if (auto v = r.quantity("snr_step", kDecibel)) {
        x.snr_step_db = *v;
    }
    if (auto v = r.integer("min_errors", 50)) {
        x.min_errors = *v;
    }
    if (auto v = r.integer("max_trials", 1)) {
        x.max_trials = *v;
    }
    if (auto v = r.integer("realizations", 1)) {
        x.realizations = *v;
    }
    const bool any_sweep = r.find("sweep_node") || r.find("sweep_axis") || r.find("sweep_start") ||
                           r.find("sweep_stop") || r.find("sweep_step");
    if (any_sweep) {
        Sweep s;
        if (auto n = r.text("sweep_node", true)) {
            s.node = *n;
            s.node[0] = static_cast<char>(std::toupper(s.node[0]));
        }
        if (auto a = r.text("sweep_axis", true)) {
            const std::string v = lower(*a);
            if (v != "x" && v != "y" && v != "z") {
                p.error_at(r.section(), *r.find("sweep_axis"), "sweep_axis must be x, y or z");
            } else {
                s.axis = v[0];
            }
        }
        if (auto v = r.quantity("sweep_start", kLength, true)) {
            s.start_m = *v;
        }
        if (auto v = r.quantity("sweep_stop", kLength, true)) {
            s.stop_m = *v;
        }
        if (auto v = r.quantity("sweep_step", kLength, true)) {
            s.step_m = *v;
        }
        x.sweep = s;
    }
    r.reject_unknown();
}

bool uses_ris(Topology t) { return t != Topology::DirectOnly; }

std::size_t panels_needed(const ScenarioGeometry& g) {
    switch (g.topology) {
    case Topology::DirectOnly: return 0;
    case Topology::DoubleReflected: return 2;
    default: return g.ris_count();
    }
}

/// Semantic checks that need the whole document.
void validate_model(Parser& p, const ScenarioFile& s, int experiment_line) {
    auto fail = [&](const std::string& section, const std::string& key, const std::string& msg) {
        p.error(0, 0, section, key, msg);
    };
    try {
        s.pathloss.validate();
    } catch (const DomainError& e) {
        fail("pathloss", "carrier", e.what());
    }
    if (s.direct_law) {
        PathLossSpec d = s.pathloss;
        d.law = *s.direct_law;
        try {
            d.validate();
        } catch (const DomainError& e) {
            fail("pathloss", "direct_law", e.what());
        }
        if (*s.direct_law == PathLossLaw::RadarRangeRIS) {
            fail("pathloss", "direct_law", "the radar-range law has no single-distance form");
        }
    }
    if (!(s.k_factor >= 0.0) || !std::isfinite(s.k_factor)) {
        fail("channel", "k_factor", "K factor must be finite and >= 0");
    }
    if (!(s.p_t_w > 0.0)) {
        fail("channel", "p_t", "transmit power must be positive");
    }
    if (!(s.n0_w > 0.0)) {
        fail("channel", "n0", "noise power must be positive");
    }
    const auto& x = s.experiment;
    if (x.kind != ExperimentKind::Rate) {
        if (!(x.snr_step_db > 0.0)) {
            fail("experiment", "snr_step", "must be positive");
        } else if (!(x.snr_stop_db >= x.snr_start_db)) {
            fail("experiment", "snr_stop", "must not be below snr_start");
        } else if (x.snr_grid_db().size() > 100000) {
            fail("experiment", "snr_step", "grid has more than 100000 points");
        }
    }
    if (x.sweep) {
        if (x.kind != ExperimentKind::Rate) {
            fail("experiment", "sweep_node", "sweeps are only supported for rate experiments");
        }
        if (!(x.sweep->step_m > 0.0) || x.sweep->stop_m < x.sweep->start_m) {
            fail("experiment", "sweep_step", "sweep needs start <= stop and a positive step");
        }
        if (!s.geometry.positions.contains(x.sweep->node)) {
            fail("experiment", "sweep_node", "node '" + x.sweep->node + "' has no position in [geometry]");
        }
    }
    if (x.kind == ExperimentKind::Sep && x.modulation.family != ModulationFamily::PSK) {
        fail("experiment", "modulation", "closed-form SEP is available for PSK only");
    }
    const auto topo = s.geometry.topology;
    if (uses_ris(topo)) {
        if (!s.fading) {
            fail("channel", "fading", "fading = none is only supported for direct_only");
        }
        const std::size_t need = panels_needed(s.geometry);
        if (need == 0) {
            fail("geometry", "", "no RIS positions or distances given");
        } else if (s.panels.empty()) {
            fail("ris", "", "at least one [ris] section is required");
        } else if (s.panels.size() != 1 && s.panels.size() != need) {
            fail("ris", "", "expected 1 or " + std::to_string(need) + " [ris] sections, got " +
                                std::to_string(s.panels.size()));
        }
        if (topo == Topology::DoubleReflected && s.geometry.ris_count() != 2) {
            fail("geometry", "", "double_reflected needs exactly two surfaces");
        }
        if (topo == Topology::SelectionOutdoor &&
            (s.geometry.near_source_count < 1 || s.geometry.near_source_count >= s.geometry.ris_count())) {
            fail("geometry", "near_source_count", "outdoor selection needs surfaces on both sides");
        }
        if ((topo == Topology::DoubleReflected || topo == Topology::SelectionOutdoor) && !s.realizable_phases &&
            !s.policy.stages.empty()) {
            fail("impairments", "", "phase impairments on double reflection need phases = realizable");
        }
    } else {
        if (!s.direct_law && s.pathloss.law == PathLossLaw::RadarRangeRIS) {
            fail("pathloss", "direct_law", "direct_only needs a single-distance law");
        }
    }
    if (!p.diags.empty()) {
        return;
    }
    // geometry and path loss evaluated end to end
    try {
        for (const auto& [param, g] : sweep_geometries(s)) {
            (void)param;
            validate_channel(build_channel(s, g));
        }
    } catch (const DomainError& e) {
        p.error(experiment_line, 0, "geometry", "", e.what());
    }
}

} // namespace

std::vector<Diagnostic> check_scenario(std::string_view text, ScenarioFile* out) {
    Parser p;
    auto sections = p.tokenize(text);
    ScenarioFile s;
    bool seen_experiment = false;
    int experiment_line = 0;
    // experiment first: it decides which channel keys are required
    for (auto& sec : sections) {
        if (sec.name == "experiment") {
            SectionReader r(p, sec);
            read_experiment(r, s);
            seen_experiment = true;
            experiment_line = sec.line;
        }
    }
    std::set<std::string> seen;
    for (auto& sec : sections) {
        if (sec.name.empty() || sec.name == "experiment") {
            continue;
        }
        seen.insert(sec.name);
        SectionReader r(p, sec);
        if (sec.name == "geometry") {
            read_geometry(r, s);
        } else if (sec.name == "ris") {
            read_ris(r, s);
        } else if (sec.name == "channel") {
            read_channel(r, s, s.experiment.kind == ExperimentKind::Rate);
        } else if (sec.name == "pathloss") {
            read_pathloss(r, s);
        } else if (sec.name == "impairments") {
            read_impairments(r, s);
        }
    }
    for (const char* required : {"geometry", "pathloss"}) {
        if (!seen.contains(required)) {
            p.error(0, 0, required, "", "required section is missing");
        }
    }
    if (!seen_experiment) {
        p.error(0, 0, "experiment", "", "required section is missing");
    }
    if (!seen.contains("channel") && s.experiment.kind == ExperimentKind::Rate) {
        p.error(0, 0, "channel", "", "required section is missing (rate experiments need p_t and n0)");
    }
    if (p.diags.empty()) {
        validate_model(p, s, experiment_line);
    }
    if (p.diags.empty() && out != nullptr) {
        *out = std::move(s);
    }
    return p.diags;
}

ScenarioFile parse_scenario(std::string_view text) {
    ScenarioFile s;
    auto diags = check_scenario(text, &s);
    if (!diags.empty()) {
        throw ScenarioError(std::move(diags));
    }
    return s;
}

std::string serialize_scenario(const ScenarioFile& s) {
    std::ostringstream os;
    auto num = [](double v) { return format_number(v); };
    const auto& g = s.geometry;
    os << "[geometry]\n";
    os << "topology = " << to_string(g.topology) << '\n';
    for (const auto& [name, p] : g.positions) {
        os << name << " = " << num(p.x) << " m, " << num(p.y) << " m, " << num(p.z) << " m\n";
    }
    if (g.d_sd) {
        os << "d_sd = " << num(*g.d_sd) << " m\n";
    }
    auto list = [&](const char* key, const std::vector<double>& v) {
        if (v.empty()) {
            return;
        }
        os << key << " = ";
        for (std::size_t i = 0; i < v.size(); ++i) {
            os << (i ? ", " : "") << num(v[i]) << " m";
        }
        os << '\n';
    };
    list("d_sr", g.d_sr);
    list("d_rd", g.d_rd);
    if (!g.d_rr.empty()) {
        os << "d_rr = ";
        for (std::size_t k = 0; k < g.d_rr.size(); ++k) {
            os << (k ? "; " : "");
            for (std::size_t l = 0; l < g.d_rr[k].size(); ++l) {
                os << (l ? ", " : "") << num(g.d_rr[k][l]) << " m";
            }
        }
        os << '\n';
    }
    os << "near_source_count = " << g.near_source_count << '\n';
    for (const auto& p : s.panels) {
        os << "\n[ris]\nelements = " << p.element_count << "\ngamma = " << num(p.gamma_mag_db) << " db\n";
    }
    os << "\n[channel]\n";
    os << "fading = " << (s.fading ? "rician" : "none") << '\n';
    os << "k_factor = " << num(s.k_factor) << " lin\n";
    os << "p_t = " << num(s.p_t_w) << " w\n";
    os << "n0 = " << num(s.n0_w) << " w\n";
    const auto& pl = s.pathloss;
    os << "\n[pathloss]\n";
    os << "law = " << to_string(pl.law) << '\n';
    if (s.direct_law) {
        os << "direct_law = " << to_string(*s.direct_law) << '\n';
    }
    os << "carrier = " << num(pl.carrier_ghz) << " ghz\n";
    os << "gain_incident = " << num(pl.ris_gains.incident) << " lin\n";
    os << "gain_reflect = " << num(pl.ris_gains.reflect) << " lin\n";
    os << "efficiency = " << num(pl.efficiency) << '\n';
    os << "reference_distance = " << num(pl.reference.d0_m) << " m\n";
    os << "reference_loss = " << num(pl.reference.pl0_db) << " db\n";
    os << "exponent = " << num(pl.reference.exponent) << '\n';
    os << "phases = " << (s.realizable_phases ? "realizable" : "aligned") << '\n';
    if (!s.policy.stages.empty()) {
        os << "\n[impairments]\n";
        for (const auto& stage : s.policy.stages) {
            if (const auto* r = std::get_if<phase::RangeLimited>(&stage)) {
                os << "phase_range = " << num(r->min_deg) << " deg, " << num(r->max_deg) << " deg\n";
                os << "range_gamma = " << num(r->gamma_mag_db) << " db\n";
            } else if (const auto* q = std::get_if<phase::Quantized>(&stage)) {
                os << "quantization_bits = " << q->bits << '\n';
            } else if (const auto* v = std::get_if<phase::VonMisesError>(&stage)) {
                os << "von_mises_kappa = " << num(v->kappa) << '\n';
            }
        }
    }
    const auto& x = s.experiment;
    os << "\n[experiment]\n";
    os << "kind = " << kind_name(x.kind) << '\n';
    os << "modulation = " << x.modulation.name() << '\n';
    os << "snr_start = " << num(x.snr_start_db) << " db\n";
    os << "snr_stop = " << num(x.snr_stop_db) << " db\n";
    os << "snr_step = " << num(x.snr_step_db) << " db\n";
    os << "min_errors = " << x.min_errors << '\n';
    os << "max_trials = " << x.max_trials << '\n';
    os << "realizations = " << x.realizations << '\n';
    if (x.sweep) {
        os << "sweep_node = " << x.sweep->node << '\n';
        os << "sweep_axis = " << x.sweep->axis << '\n';
        os << "sweep_start = " << num(x.sweep->start_m) << " m\n";
        os << "sweep_stop = " << num(x.sweep->stop_m) << " m\n";
        os << "sweep_step = " << num(x.sweep->step_m) << " m\n";
    }
    return os.str();
}

std::string scenario_hash(const ScenarioFile& scenario) { return fnv1a_hex(serialize_scenario(scenario)); }

std::string fnv1a_hex(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

PathLossSpec with_law(const PathLossSpec& base, PathLossLaw law) {
    PathLossSpec s = base;
    s.law = law;
    return s;
}

} // namespace

PathLossValue ris_hop_loss(const ScenarioFile& s, const ScenarioGeometry& g, std::size_t k) {
    const double d1 = g.source_to_ris(k);
    const double d2 = g.ris_to_destination(k);
    if (s.pathloss.law == PathLossLaw::RadarRangeRIS) {
        return radar_range_ris_loss(s.pathloss, d1, d2);
    }
    return PathLossValue::from_db(link_loss(s.pathloss, d1).loss_db + link_loss(s.pathloss, d2).loss_db);
}

PathLossValue double_hop_loss(const ScenarioFile& s, const ScenarioGeometry& g, std::size_t k, std::size_t l) {
    const double d1 = g.source_to_ris(k);
    const double d2 = g.ris_to_ris(k, l);
    const double d3 = g.ris_to_destination(g.near_source_count + l);
    if (s.pathloss.law == PathLossLaw::RadarRangeRIS) {
        return radar_range_double_loss(s.pathloss, d1, d2, d3);
    }
    return PathLossValue::from_db(link_loss(s.pathloss, d1).loss_db + link_loss(s.pathloss, d2).loss_db +
                                  link_loss(s.pathloss, d3).loss_db);
}

namespace {

RisPanel panel_for(const ScenarioFile& s, std::size_t k) {
    RisPanel p = s.panels.size() == 1 ? s.panels.front() : s.panels.at(k);
    p.phase_policy = s.policy;
    return p;
}

channel::DoubleReflected double_link(const ScenarioFile& s, const ScenarioGeometry& g, std::size_t k,
                                     std::size_t l) {
    channel::DoubleReflected d;
    d.first = panel_for(s, k);
    d.second = panel_for(s, g.near_source_count + l);
    d.fading = RicianSpec{s.k_factor};
    d.pl = double_hop_loss(s, g, k, l);
    d.realizable_phases = s.realizable_phases;
    return d;
}

} // namespace

ChannelModel build_channel(const ScenarioFile& s, const ScenarioGeometry& g) {
    const RicianSpec k{s.k_factor};
    auto surface = [&](std::size_t i) {
        return channel::SurfaceLink{panel_for(s, i), k, k, ris_hop_loss(s, g, i)};
    };
    switch (g.topology) {
    case Topology::DirectOnly: {
        const PathLossSpec spec = with_law(s.pathloss, s.direct_law.value_or(s.pathloss.law));
        return channel::Direct{k, s.fading, link_loss(spec, g.source_to_destination())};
    }
    case Topology::SingleRis:
    case Topology::DualSimultaneous: {
        channel::Simultaneous m;
        for (std::size_t i = 0; i < g.ris_count(); ++i) {
            m.links.push_back(surface(i));
        }
        return m;
    }
    case Topology::SelectionIndoor: {
        channel::SelectIndoor m;
        for (std::size_t i = 0; i < g.ris_count(); ++i) {
            m.links.push_back(surface(i));
        }
        return m;
    }
    case Topology::DoubleReflected: return double_link(s, g, 0, 0);
    case Topology::SelectionOutdoor: {
        const std::size_t near = g.near_source_count;
        const std::size_t far = g.ris_count() - near;
        channel::SelectOutdoor m{Grid<channel::DoubleReflected>(near, far)};
        for (std::size_t a = 0; a < near; ++a) {
            for (std::size_t b = 0; b < far; ++b) {
                m.pairs(a, b) = double_link(s, g, a, b);
            }
        }
        return m;
    }
    }
    throw DomainError("unknown topology");
}

std::vector<std::pair<double, ScenarioGeometry>> sweep_geometries(const ScenarioFile& s) {
    const auto& sw = s.experiment.sweep;
    if (!sw) {
        return {{0.0, s.geometry}};
    }
    std::vector<std::pair<double, ScenarioGeometry>> out;
    for (double v : sw->values()) {
        ScenarioGeometry g = s.geometry;
        Point3& p = g.positions.at(sw->node);
        (sw->axis == 'x' ? p.x : sw->axis == 'y' ? p.y : p.z) = v;
        out.emplace_back(v, std::move(g));
    }
    return out;
}

TrialPlan build_trial_plan(const ScenarioFile& s, std::uint64_t seed, int workers) {
    TrialPlan plan;
    plan.channel = build_channel(s, s.geometry);
    plan.modulation = s.experiment.modulation;
    plan.snr_grid_db = s.experiment.snr_grid_db();
    plan.min_errors = s.experiment.min_errors;
    plan.max_trials = s.experiment.max_trials;
    plan.seed = seed;
    plan.workers = workers;
    return plan;
}

RatePlan build_rate_plan(const ScenarioFile& s, std::uint64_t seed, int workers) {
    RatePlan plan;
    for (auto& [param, g] : sweep_geometries(s)) {
        plan.points.push_back({param, build_channel(s, g)});
    }
    plan.p_t_w = s.p_t_w;
    plan.n0_w = s.n0_w;
    plan.realizations = s.experiment.realizations;
    plan.seed = seed;
    plan.workers = workers;
    return plan;
}

std::optional<CltAmplitudeModel> clt_model(const ScenarioFile& s, const ScenarioGeometry& g) {
    if (!s.policy.stages.empty()) {
        return std::nullopt;
    }
    const RicianSpec k{s.k_factor};
    switch (g.topology) {
    case Topology::SingleRis:
    case Topology::DualSimultaneous: {
        std::vector<std::size_t> n;
        std::vector<PathLossValue> pl;
        for (std::size_t i = 0; i < g.ris_count(); ++i) {
            const RisPanel p = panel_for(s, i);
            n.push_back(p.element_count);
            // reflection magnitude folds into the per-surface loss
            pl.push_back(PathLossValue::from_db(ris_hop_loss(s, g, i).loss_db - p.gamma_mag_db));
        }
        auto m = clt_moments_simultaneous(n, pl, k);
        m.topology = g.topology;
        return m;
    }
    case Topology::DoubleReflected: {
        const RisPanel a = panel_for(s, 0);
        const RisPanel b = panel_for(s, 1);
        if (a.element_count != b.element_count || s.realizable_phases) {
            return std::nullopt;
        }
        const auto pl = PathLossValue::from_db(double_hop_loss(s, g, 0, 0).loss_db - a.gamma_mag_db - b.gamma_mag_db);
        return clt_moments_double(a.element_count, pl, k);
    }
    default: return std::nullopt;
    }
}

} // namespace rislink
