#include <algorithm>
#include <charconv>
#include <sstream>

#include "workcell/holons.hpp"

namespace workcell::holons {

namespace {

constexpr std::string_view pump_catalog = R"(# Pump parts and where they sit on the storage workstation.
Casing color=$color @A1
Electrical-Motor power=$power @A2
Shaft material=steel @A3
Impeller type=closed @A4
Operations-List operations=fit-impeller,mount-motor,close-casing
)";

constexpr std::string_view compressor_catalog = R"(# Compressor parts and where they sit on the storage workstation.
Casing color=$color @B1
Electrical-Motor power=$power @B2
Female-Rotor size=medium @B3
Male-Rotor size=medium @B4
Operations-List operations=fit-rotors,mount-motor,close-casing
)";

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        out.emplace_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace

PartCatalog parse_catalog(std::string_view text) {
    PartCatalog catalog;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    bool saw_operations = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream words(line);
        std::string schema;
        if (!(words >> schema)) continue;
        if (!sl::is_symbol(schema)) throw CatalogError(lineno, "bad schema name '" + schema + "'");

        if (schema == onto::names::operations_list) {
            if (saw_operations) throw CatalogError(lineno, "duplicate Operations-List line");
            saw_operations = true;
            std::string token;
            while (words >> token) {
                if (token.rfind("operations=", 0) != 0) throw CatalogError(lineno, "expected operations=<a,b,c>");
                std::string list = token.substr(std::string("operations=").size());
                if (list.empty()) continue;
                for (auto& op : split(list, ',')) {
                    if (!sl::is_symbol(op)) throw CatalogError(lineno, "bad operation name '" + op + "'");
                    catalog.operations.push_back(std::move(op));
                }
            }
            continue;
        }

        PartSpec part{schema, {}, {}};
        std::string token;
        while (words >> token) {
            if (token.front() == '@') {
                if (!part.position.empty()) throw CatalogError(lineno, "more than one position");
                part.position = token.substr(1);
                if (!sl::is_symbol(part.position)) throw CatalogError(lineno, "bad position cell '" + part.position + "'");
                continue;
            }
            auto eq = token.find('=');
            if (eq == std::string::npos || eq == 0 || eq + 1 == token.size())
                throw CatalogError(lineno, "expected attribute=value, got '" + token + "'");
            part.attributes.emplace_back(token.substr(0, eq), token.substr(eq + 1));
        }
        if (part.position.empty()) throw CatalogError(lineno, "part " + schema + " has no @position");
        catalog.parts.push_back(std::move(part));
    }
    return catalog;
}

std::string_view default_catalog_text(ProductKind kind) {
    return kind == ProductKind::pump ? pump_catalog : compressor_catalog;
}

PartCatalog default_catalog(ProductKind kind) { return parse_catalog(default_catalog_text(kind)); }

void check_catalog(const onto::OntologyRegistry& reg, ProductKind kind, const PartCatalog& catalog) {
    const char* product = kind == ProductKind::pump ? onto::names::pump : onto::names::compressor;
    for (const auto& slot : reg.all_slots(product)) {
        const auto* ref = std::get_if<onto::ConceptRef>(&slot.type);
        if (!ref) continue;
        auto n = std::count_if(catalog.parts.begin(), catalog.parts.end(),
                               [&](const PartSpec& p) { return p.schema == ref->schema; });
        if (n != 1) throw CatalogError(0, std::string(product) + " needs exactly one " + ref->schema + " entry");
    }
    for (const auto& part : catalog.parts) {
        const auto* schema = reg.find_concept(part.schema);
        if (!schema) throw CatalogError(0, "unknown part schema " + part.schema);
        for (const auto& [attr, value] : part.attributes) {
            auto spec = std::find_if(schema->slots.begin(), schema->slots.end(),
                                     [&](const onto::SlotSpec& s) { return s.name == attr; });
            if (spec == schema->slots.end() || attr == "position")
                throw CatalogError(0, part.schema + " has no attribute " + attr);
            auto prim = std::get<onto::Primitive>(spec->type);
            bool ok = false;
            if (value == "$color") ok = prim == onto::Primitive::symbol;
            else if (value == "$power") ok = prim == onto::Primitive::integer;
            else if (prim == onto::Primitive::integer) {
                std::int64_t v = 0;
                auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
                ok = ec == std::errc{} && p == value.data() + value.size();
            } else {
                ok = sl::is_symbol(value);
            }
            if (!ok) throw CatalogError(0, "bad value '" + value + "' for " + part.schema + "." + attr);
        }
        for (const auto& slot : schema->slots) {
            if (!slot.mandatory || slot.name == "position") continue;
            bool given = std::any_of(part.attributes.begin(), part.attributes.end(),
                                     [&](const auto& a) { return a.first == slot.name; });
            if (!given) throw CatalogError(0, part.schema + " is missing attribute " + slot.name);
        }
    }
    if (catalog.operations.size() > onto::max_operations)
        throw CatalogError(0, "at most " + std::to_string(onto::max_operations) + " operations");
}

}  // namespace workcell::holons
