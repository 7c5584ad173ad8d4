#ifndef LINREC_RECFILE_HPP
#define LINREC_RECFILE_HPP

#include <fstream>
#include <string>

#include <json.hpp>

#include "linrec/holonomic.hpp"

// Line-oriented JSON serialization of holonomic recurrences.  All numbers
// travel as decimal strings so 64-bit-plus moduli and big integers survive
// parsing; rationals use the "num/den" form.

namespace linrec {

using ordered_json = nlohmann::ordered_json;

struct RingDesc {
    DomainKind kind = DomainKind::Rational;
    u64 modulus = 0;
};

inline RingDesc ring_from_json(const ordered_json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw ParseError("ring: expected an object with a \"kind\" string");
    RingDesc r;
    std::string kind = j["kind"].get<std::string>();
    if (kind == "prime-field") {
        r.kind = DomainKind::PrimeField;
        if (!j.contains("modulus") || !j["modulus"].is_string())
            throw ParseError("ring: prime-field needs a decimal \"modulus\" string");
        const std::string& m = j["modulus"].get<std::string>();
        mpz_class z;
        if (z.set_str(m, 10) != 0 || z <= 0) throw ParseError("ring: bad modulus " + m);
        if (!z.fits_ulong_p()) throw ParseError("ring: modulus exceeds the supported 63-bit range");
        r.modulus = z.get_ui();
    } else if (kind == "rational") {
        r.kind = DomainKind::Rational;
    } else if (kind == "float64") {
        r.kind = DomainKind::Float64;
    } else {
        throw ParseError("ring: unknown kind " + kind);
    }
    return r;
}

inline ordered_json ring_to_json(const RingDesc& r) {
    ordered_json j;
    switch (r.kind) {
        case DomainKind::PrimeField:
            j["kind"] = "prime-field";
            j["modulus"] = std::to_string(r.modulus);
            break;
        case DomainKind::Rational:
            j["kind"] = "rational";
            break;
        case DomainKind::Float64:
            j["kind"] = "float64";
            break;
    }
    return j;
}

template <class D>
HolonomicRecurrence<D> rec_from_json(const D& dom, const ordered_json& j) {
    for (const char* field : {"depth", "degree", "coeffs", "initial", "offset"})
        if (!j.contains(field)) throw ParseError(std::string("recurrence: missing field ") + field);
    if (!j["depth"].is_number_unsigned()) throw ParseError("recurrence: depth must be a non-negative integer");
    if (!j["offset"].is_number_unsigned()) throw ParseError("recurrence: offset must be a non-negative integer");
    std::size_t depth = j["depth"].get<std::size_t>();
    if (depth < 1 || depth > 4096) throw ParseError("recurrence: depth out of range");
    if (!j["coeffs"].is_array() || j["coeffs"].size() != depth + 1)
        throw ParseError("recurrence: coeffs must hold depth+1 coefficient lists");
    if (!j["initial"].is_array() || j["initial"].size() != depth)
        throw ParseError("recurrence: initial must hold exactly depth terms");
    std::vector<DensePoly<D>> coeffs;
    for (const auto& lst : j["coeffs"]) {
        if (!lst.is_array()) throw ParseError("recurrence: coefficient entries must be string lists");
        std::vector<typename D::Elem> c;
        for (const auto& s : lst) {
            if (!s.is_string()) throw ParseError("recurrence: coefficients must be decimal strings");
            c.push_back(dom.parse(s.get<std::string>()));
        }
        coeffs.emplace_back(dom, std::move(c));
    }
    std::vector<typename D::Elem> init;
    for (const auto& s : j["initial"]) {
        if (!s.is_string()) throw ParseError("recurrence: initial terms must be decimal strings");
        init.push_back(dom.parse(s.get<std::string>()));
    }
    u64 offset = j["offset"].get<u64>();
    try {
        return HolonomicRecurrence<D>(dom, std::move(coeffs), std::move(init), offset);
    } catch (const Error& e) {
        throw ParseError(std::string("recurrence: ") + e.what());
    }
}

template <class D>
ordered_json rec_to_json(const RingDesc& ring, const HolonomicRecurrence<D>& rec) {
    const D& dom = rec.dom;
    ordered_json j;
    j["ring"] = ring_to_json(ring);
    j["depth"] = rec.depth();
    j["degree"] = rec.degree() < 0 ? 0 : u64(rec.degree());
    ordered_json coeffs = ordered_json::array();
    for (const auto& c : rec.coeffs) {
        ordered_json lst = ordered_json::array();
        for (const auto& e : c.c) lst.push_back(dom.to_string(e));
        coeffs.push_back(std::move(lst));
    }
    j["coeffs"] = std::move(coeffs);
    ordered_json init = ordered_json::array();
    for (const auto& e : rec.initial) init.push_back(dom.to_string(e));
    j["initial"] = std::move(init);
    j["offset"] = rec.offset;
    return j;
}

inline ordered_json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return j;
}

inline void store_json_file(const std::string& path, const ordered_json& j) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << j.dump(2) << "\n";
}

}  // namespace linrec

#endif
