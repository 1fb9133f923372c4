#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sata/error.hpp"
#include "sata/mask.hpp"

namespace sata {

using ordered_json = nlohmann::ordered_json;

namespace {

std::size_t require_count(const ordered_json& doc, const char* key) {
    if (!doc.contains(key) || !doc[key].is_number_unsigned()) {
        throw ParseError(std::string("field '") + key + "' must be a non-negative integer");
    }
    return doc[key].get<std::size_t>();
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::string mask_to_json(const SelectiveMask& mask) {
    ordered_json doc;
    doc["format"] = "sata-mask";
    doc["version"] = 1;
    doc["seq_len"] = mask.seq_len;
    doc["n_heads"] = mask.n_heads;
    doc["k_per_query"] = mask.k_per_query ? ordered_json(*mask.k_per_query) : ordered_json(nullptr);
    ordered_json heads = ordered_json::array();
    for (const auto& head : mask.heads) {
        ordered_json rows = ordered_json::array();
        for (std::size_t q = 0; q < head.rows(); ++q) rows.push_back(head.row_string(q));
        heads.push_back(std::move(rows));
    }
    doc["heads"] = std::move(heads);
    return doc.dump(2) + "\n";
}

SelectiveMask mask_from_json(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("top level must be an object");
    if (doc.value("format", "") != "sata-mask") throw ParseError("format must be \"sata-mask\"");
    if (!doc.contains("version") || doc["version"] != 1) throw ParseError("unsupported version");

    SelectiveMask mask;
    mask.seq_len = require_count(doc, "seq_len");
    mask.n_heads = require_count(doc, "n_heads");
    if (!doc.contains("k_per_query")) throw ParseError("missing field 'k_per_query'");
    if (!doc["k_per_query"].is_null()) mask.k_per_query = require_count(doc, "k_per_query");
    if (mask.seq_len == 0) throw ParseError("seq_len must be positive");

    const auto& heads = doc["heads"];
    if (!heads.is_array()) throw ParseError("field 'heads' must be an array");
    if (heads.size() != mask.n_heads) {
        throw ParseError("expected " + std::to_string(mask.n_heads) + " heads, found " +
                         std::to_string(heads.size()));
    }
    const std::size_t n = mask.seq_len;
    for (std::size_t h = 0; h < heads.size(); ++h) {
        const auto& rows = heads[h];
        const std::string where = "head " + std::to_string(h);
        if (!rows.is_array()) throw ParseError(where + ": must be an array of row strings");
        if (rows.size() != n) {
            throw ParseError(where + ": " + std::to_string(rows.size()) + " rows, expected " + std::to_string(n));
        }
        HeadMask head(n);
        for (std::size_t q = 0; q < n; ++q) {
            const std::string at = where + ", row " + std::to_string(q);
            if (!rows[q].is_string()) throw ParseError(at + ": not a string");
            const auto& s = rows[q].get_ref<const std::string&>();
            if (s.size() != n) {
                throw ParseError(at + ": length " + std::to_string(s.size()) + ", expected " + std::to_string(n));
            }
            for (std::size_t k = 0; k < n; ++k) {
                if (s[k] != '0' && s[k] != '1') {
                    throw ParseError(at + ": illegal character '" + std::string(1, s[k]) + "' at column " +
                                     std::to_string(k));
                }
                if (s[k] == '1') head.set(q, k);
            }
        }
        mask.heads.push_back(std::move(head));
    }

    const auto diags = validate_mask(mask);
    if (!diags.empty()) {
        const auto& d = diags.front();
        std::string msg = "invalid mask";
        if (d.head) msg += ": head " + std::to_string(*d.head);
        if (d.row) msg += ", row " + std::to_string(*d.row);
        throw ValidationError(msg + ": " + d.message);
    }
    return mask;
}

void save_mask(const SelectiveMask& mask, const std::filesystem::path& path) {
    write_text_file(path, mask_to_json(mask));
}

SelectiveMask load_mask(const std::filesystem::path& path) { return mask_from_json(read_text_file(path)); }

}  // namespace sata
