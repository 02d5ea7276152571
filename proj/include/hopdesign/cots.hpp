#pragma once

// Component inventory indexed by the integer COTS design variables.
//
// File format: comma-separated text, '#' starts a comment line, first
// non-comment line is the header
//
//   category,id,name,mass_kg,volume_m3,power_w,clock_mhz,storage_gb,
//   capacity_wh,freq_low_mhz,freq_high_mhz,bandwidth_mhz
//
// Spec columns are required for their own category and must be empty for
// the others. Ids run 1..n within each category.

#include "text.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hopdesign::cots {

enum class Category { computer, power_board, battery, transceiver, attitude_board };

inline constexpr std::array<Category, 5> all_categories{Category::computer, Category::power_board, Category::battery,
                                                        Category::transceiver, Category::attitude_board};

inline const char* to_string(Category c) {
    switch (c) {
        case Category::computer: return "computer";
        case Category::power_board: return "power_board";
        case Category::battery: return "battery";
        case Category::transceiver: return "transceiver";
        case Category::attitude_board: return "attitude_board";
    }
    return "?";
}

inline std::optional<Category> category_from_string(std::string_view s) {
    for (Category c : all_categories)
        if (s == to_string(c)) return c;
    return std::nullopt;
}

struct CotsRecord {
    Category category = Category::computer;
    int id = 0;
    std::string name;
    double mass = 0.0;    // kg
    double volume = 0.0;  // m^3
    double power = 0.0;   // W
    // clock_mhz, storage_gb (computer); capacity_wh (battery);
    // freq_low_mhz, freq_high_mhz, bandwidth_mhz (transceiver)
    std::map<std::string, double> specs;

    double spec(const std::string& key) const {
        const auto it = specs.find(key);
        if (it == specs.end())
            throw std::out_of_range(std::string(to_string(category)) + " " + std::to_string(id) + " has no spec '" +
                                    key + "'");
        return it->second;
    }

    bool operator==(const CotsRecord&) const = default;
};

class InventoryError : public std::runtime_error {
  public:
    InventoryError(const std::string& source, std::size_t row, std::string column, const std::string& what)
        : std::runtime_error(source + ":" + std::to_string(row) + (column.empty() ? "" : " [" + column + "]") + ": " +
                             what),
          row_(row),
          column_(std::move(column)) {}
    std::size_t row() const { return row_; }
    const std::string& column() const { return column_; }

  private:
    std::size_t row_;
    std::string column_;
};

inline const std::vector<std::string>& columns() {
    static const std::vector<std::string> cols{"category",     "id",          "name",        "mass_kg",
                                               "volume_m3",    "power_w",     "clock_mhz",   "storage_gb",
                                               "capacity_wh",  "freq_low_mhz", "freq_high_mhz", "bandwidth_mhz"};
    return cols;
}

inline std::vector<std::string> required_specs(Category c) {
    switch (c) {
        case Category::computer: return {"clock_mhz", "storage_gb"};
        case Category::battery: return {"capacity_wh"};
        case Category::transceiver: return {"freq_low_mhz", "freq_high_mhz", "bandwidth_mhz"};
        default: return {};
    }
}

class Inventory {
  public:
    const std::vector<CotsRecord>& records(Category c) const { return by_category_[index(c)]; }
    std::size_t count(Category c) const { return records(c).size(); }
    const std::string& digest() const { return digest_; }

    /// Record with the given 1-based id; throws std::out_of_range otherwise.
    const CotsRecord& get(Category c, int id) const {
        const auto& recs = records(c);
        if (id < 1 || static_cast<std::size_t>(id) > recs.size())
            throw std::out_of_range(std::string("no ") + to_string(c) + " with id " + std::to_string(id) + " (have 1.." +
                                    std::to_string(recs.size()) + ")");
        return recs[static_cast<std::size_t>(id - 1)];
    }

    bool operator==(const Inventory& other) const { return by_category_ == other.by_category_; }

    static Inventory parse(const std::string& content, const std::string& source = "<inventory>");
    std::string serialize() const;

  private:
    static std::size_t index(Category c) { return static_cast<std::size_t>(c); }
    std::array<std::vector<CotsRecord>, 5> by_category_;
    std::string digest_;
};

inline Inventory Inventory::parse(const std::string& content, const std::string& source) {
    Inventory inv;
    inv.digest_ = text::fnv1a64(content);
    std::istringstream in(content);
    std::string line;
    std::size_t row = 0;
    bool have_header = false;
    std::map<std::pair<Category, int>, std::size_t> seen;
    const auto& cols = columns();

    while (std::getline(in, line)) {
        ++row;
        const auto trimmed = text::trim(line);
        if (trimmed.empty() || trimmed.front() == '#') continue;
        const auto fields = text::split(trimmed, ',');
        if (!have_header) {
            if (fields != cols) throw InventoryError(source, row, "", "header must be: category,id,name,...");
            have_header = true;
            continue;
        }
        if (fields.size() != cols.size())
            throw InventoryError(source, row, "", "expected " + std::to_string(cols.size()) + " fields, found " +
                                                      std::to_string(fields.size()));

        CotsRecord rec;
        const auto cat = category_from_string(fields[0]);
        if (!cat) throw InventoryError(source, row, "category", "unknown category '" + fields[0] + "'");
        rec.category = *cat;
        const auto id = text::parse_int(fields[1]);
        if (!id || *id < 1) throw InventoryError(source, row, "id", "id must be a positive integer");
        rec.id = static_cast<int>(*id);
        if (fields[2].empty()) throw InventoryError(source, row, "name", "name is empty");
        rec.name = fields[2];

        auto number = [&](std::size_t col) {
            const auto v = text::parse_double(fields[col]);
            if (!v) throw InventoryError(source, row, cols[col], "not a number: '" + fields[col] + "'");
            if (!(*v >= 0.0)) throw InventoryError(source, row, cols[col], "must be nonnegative");
            return *v;
        };
        rec.mass = number(3);
        rec.volume = number(4);
        rec.power = number(5);

        const auto needed = required_specs(rec.category);
        for (std::size_t col = 6; col < cols.size(); ++col) {
            const bool required = std::find(needed.begin(), needed.end(), cols[col]) != needed.end();
            if (fields[col].empty()) {
                if (required) throw InventoryError(source, row, cols[col], "required for " + fields[0]);
                continue;
            }
            if (!required) throw InventoryError(source, row, cols[col], "not applicable to " + fields[0]);
            rec.specs[cols[col]] = number(col);
        }
        if (rec.category == Category::transceiver) {
            const double lo = rec.specs["freq_low_mhz"], hi = rec.specs["freq_high_mhz"],
                         bw = rec.specs["bandwidth_mhz"];
            if (!(lo < hi)) throw InventoryError(source, row, "freq_high_mhz", "freq_low must be below freq_high");
            if (!(bw < hi - lo))
                throw InventoryError(source, row, "bandwidth_mhz", "bandwidth must be narrower than the band");
        }

        const auto key = std::make_pair(rec.category, rec.id);
        if (const auto it = seen.find(key); it != seen.end())
            throw InventoryError(source, row, "id",
                                 "duplicate (" + fields[0] + ", " + fields[1] + "), first seen on row " +
                                     std::to_string(it->second));
        seen[key] = row;
        inv.by_category_[index(rec.category)].push_back(std::move(rec));
    }
    if (!have_header) throw InventoryError(source, row, "", "missing header row");

    for (Category c : all_categories) {
        auto& recs = inv.by_category_[index(c)];
        if (recs.empty()) throw InventoryError(source, row, "category", std::string("no ") + to_string(c) + " records");
        std::sort(recs.begin(), recs.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
        for (std::size_t i = 0; i < recs.size(); ++i)
            if (recs[i].id != static_cast<int>(i + 1))
                throw InventoryError(source, seen[{c, recs[i].id}], "id",
                                     std::string(to_string(c)) + " ids must run 1.." + std::to_string(recs.size()));
    }
    return inv;
}

inline std::string Inventory::serialize() const {
    std::string out;
    const auto& cols = columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
    out += '\n';
    for (const auto& recs : by_category_)
        for (const auto& r : recs) {
            out += std::string(to_string(r.category)) + "," + std::to_string(r.id) + "," + r.name + "," +
                   text::format_double(r.mass) + "," + text::format_double(r.volume) + "," +
                   text::format_double(r.power);
            for (std::size_t col = 6; col < cols.size(); ++col) {
                out += ',';
                if (const auto it = r.specs.find(cols[col]); it != r.specs.end()) out += text::format_double(it->second);
            }
            out += '\n';
        }
    return out;
}

inline Inventory load_inventory(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InventoryError(path, 0, "", "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return Inventory::parse(ss.str(), path);
}

/// G5: the antenna resonance must sit inside the band with half the channel
/// bandwidth to spare on each side (closed interval).
inline bool bandwidth_check(const CotsRecord& transceiver, double f_antenna_mhz) {
    if (transceiver.category != Category::transceiver)
        throw std::invalid_argument("bandwidth_check: record is not a transceiver");
    const double half = 0.5 * transceiver.spec("bandwidth_mhz");
    return transceiver.spec("freq_low_mhz") + half <= f_antenna_mhz &&
           f_antenna_mhz <= transceiver.spec("freq_high_mhz") - half;
}

}  // namespace hopdesign::cots
