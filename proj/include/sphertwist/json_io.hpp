#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "json.hpp"

#include "sphertwist/admodule.hpp"
#include "sphertwist/algebra.hpp"
#include "sphertwist/error.hpp"
#include "sphertwist/field.hpp"
#include "sphertwist/grouptheory.hpp"
#include "sphertwist/spherical.hpp"
#include "sphertwist/twisted.hpp"
#include "sphertwist/zigzag.hpp"

namespace sphertwist {

// Keys keep their insertion order, so every serializer in this header emits
// the fixed layout documented in docs/formats.md and outputs can be pinned
// byte-for-byte by golden-file tests.
using json = nlohmann::ordered_json;

// Parse errors belong to the usage/schema exit class, not to the internal
// invariant classes, so the library exception replaces the json one here.
inline json parse_json_text(const std::string& text, const std::string& what = "input") {
    try {
        return json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(errc::usage, what + ": malformed JSON (" + e.what() + ")");
    }
}

namespace jsondetail {

inline void expect(bool ok, const std::string& what) { require(ok, errc::usage, what); }

inline const json& member(const json& j, const char* key, const std::string& what) {
    expect(j.is_object(), what + ": expected a JSON object");
    expect(j.contains(key), what + ": missing key '" + std::string(key) + "'");
    return j.at(key);
}

inline int as_int(const json& j, const std::string& what) {
    expect(j.is_number_integer(), what + ": expected an integer");
    return j.get<int>();
}

inline std::string as_string(const json& j, const std::string& what) {
    expect(j.is_string(), what + ": expected a string");
    return j.get<std::string>();
}

// Object keys that carry degrees or positions are stringified integers.
inline int as_int_key(const std::string& key, const std::string& what) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(key, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    expect(!key.empty() && used == key.size(), what + ": key '" + key + "' is not an integer");
    return v;
}

// Matrices travel as arrays of rows of field literals, rows indexed by the
// target basis and columns by the source basis.
template <class K>
json matrix_to_json(const Mat<K>& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(field_to_string(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

template <class K>
Mat<K> matrix_from_json(const json& j, int rows, int cols, const std::string& what) {
    expect(j.is_array() && static_cast<int>(j.size()) == rows,
           what + ": expected " + std::to_string(rows) + " rows");
    Mat<K> m = zeros<K>(rows, cols);
    for (int r = 0; r < rows; ++r) {
        const json& row = j.at(static_cast<std::size_t>(r));
        expect(row.is_array() && static_cast<int>(row.size()) == cols,
               what + ": row " + std::to_string(r) + " must have " + std::to_string(cols) +
                   " entries");
        for (int c = 0; c < cols; ++c)
            m(r, c) =
                field_from_string<K>(as_string(row.at(static_cast<std::size_t>(c)), what));
    }
    return m;
}

} // namespace jsondetail

// --- graphs -------------------------------------------------------------

// {"vertices": ["1", "2"], "edges": [[0, 1], [0, 1]]}; edges index vertices.
inline json graph_to_json(const MultiGraph& g) {
    json verts = json::array();
    for (auto& v : g.vertices) verts.push_back(v);
    json edges = json::array();
    for (auto& [v, w] : g.edges) edges.push_back(json::array({v, w}));
    json j;
    j["vertices"] = verts;
    j["edges"] = edges;
    return j;
}

inline MultiGraph graph_from_json(const json& j) {
    using jsondetail::as_int;
    using jsondetail::as_string;
    using jsondetail::expect;
    using jsondetail::member;
    MultiGraph g;
    const json& verts = member(j, "vertices", "graph");
    expect(verts.is_array() && !verts.empty(), "graph: 'vertices' must be a nonempty array");
    for (auto& v : verts) g.vertices.push_back(as_string(v, "graph vertex"));
    const json& edges = member(j, "edges", "graph");
    expect(edges.is_array(), "graph: 'edges' must be an array");
    for (auto& e : edges) {
        expect(e.is_array() && e.size() == 2, "graph edge: expected [v, w]");
        g.edges.push_back({as_int(e.at(0), "graph edge endpoint"),
                           as_int(e.at(1), "graph edge endpoint")});
    }
    validate_graph(g);
    return g;
}

// --- graded algebras ------------------------------------------------------

// {"basis": [{"label": "e1", "degree": 0}, ...],
//  "products": [[i, j, ["c0", ..., "c(n-1)"]], ...],
//  "idempotents": [0, 1],
//  "frobenius": {"pairing": [["..."]], "d": 2}}
// products lists b_i * b_j as a dense coefficient vector over the basis;
// pairs absent from the list multiply to zero. frobenius is null for a plain
// graded algebra; its trace functional is not stored separately because
// trace(b_k) = pairing(k, t) with t the index of the idempotent e satisfying
// e * b_k = b_k.
template <class K>
json algebra_to_json(const GradedAlgebra<K>& a) {
    const int n = a.size();
    json basis = json::array();
    for (int i = 0; i < n; ++i) {
        json b;
        b["label"] = a.element(i).label;
        b["degree"] = a.element(i).degree;
        basis.push_back(std::move(b));
    }
    json products = json::array();
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const AlgElem<K>& p = a.basis_product(i, k);
            if (p.is_zero_elem()) continue;
            json coeffs = json::array();
            for (int t = 0; t < n; ++t) coeffs.push_back(field_to_string(p.coeff(t)));
            products.push_back(json::array({i, k, std::move(coeffs)}));
        }
    json idem = json::array();
    for (int e : a.idempotents()) idem.push_back(e);
    json j;
    j["basis"] = std::move(basis);
    j["products"] = std::move(products);
    j["idempotents"] = std::move(idem);
    if (a.frobenius()) {
        json f;
        f["pairing"] = jsondetail::matrix_to_json(a.frobenius()->pairing);
        f["d"] = a.frobenius()->cy_dimension;
        j["frobenius"] = std::move(f);
    } else {
        j["frobenius"] = json(nullptr);
    }
    return j;
}

template <class K>
GradedAlgebra<K> algebra_from_json(const json& j) {
    using jsondetail::as_int;
    using jsondetail::as_string;
    using jsondetail::expect;
    using jsondetail::member;

    const json& jb = member(j, "basis", "algebra");
    expect(jb.is_array() && !jb.empty(), "algebra: 'basis' must be a nonempty array");
    std::vector<std::pair<std::string, int>> basis;
    for (auto& b : jb)
        basis.push_back({as_string(member(b, "label", "algebra basis element"), "algebra label"),
                         as_int(member(b, "degree", "algebra basis element"), "algebra degree")});
    const int n = static_cast<int>(basis.size());

    const json& jp = member(j, "products", "algebra");
    expect(jp.is_array(), "algebra: 'products' must be an array");
    std::map<std::pair<int, int>, AlgElem<K>> products;
    for (auto& p : jp) {
        expect(p.is_array() && p.size() == 3, "algebra product: expected [i, j, [coeffs]]");
        const int i = as_int(p.at(0), "algebra product index");
        const int k = as_int(p.at(1), "algebra product index");
        expect(i >= 0 && i < n && k >= 0 && k < n, "algebra product: index out of range");
        expect(!products.count({i, k}), "algebra product: duplicate pair");
        const json& cv = p.at(2);
        expect(cv.is_array() && static_cast<int>(cv.size()) == n,
               "algebra product: coefficient vector must have one entry per basis element");
        AlgElem<K> e;
        for (int t = 0; t < n; ++t) {
            const K c = field_from_string<K>(
                as_string(cv.at(static_cast<std::size_t>(t)), "algebra product coefficient"));
            if (!is_zero(c)) e.terms.push_back({t, c});
        }
        products[{i, k}] = std::move(e);
    }

    const json& ji = member(j, "idempotents", "algebra");
    expect(ji.is_array() && !ji.empty(), "algebra: 'idempotents' must be a nonempty array");
    std::vector<int> idem;
    for (auto& e : ji) {
        const int v = as_int(e, "algebra idempotent index");
        expect(v >= 0 && v < n, "algebra idempotent: index out of range");
        idem.push_back(v);
    }

    if (!j.contains("frobenius") || j.at("frobenius").is_null())
        return GradedAlgebra<K>(std::move(basis), std::move(products), std::move(idem));

    const json& jf = j.at("frobenius");
    const int cy = as_int(member(jf, "d", "algebra frobenius"), "algebra frobenius 'd'");
    const Mat<K> pairing = jsondetail::matrix_from_json<K>(
        member(jf, "pairing", "algebra frobenius"), n, n, "algebra frobenius pairing");
    // A first pass without the certificate locates each element's target
    // idempotent, from which the trace functional is read off the pairing.
    const GradedAlgebra<K> bare(basis, products, idem);
    std::vector<K> trace;
    trace.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        trace.push_back(pairing(k, bare.idempotent_of_vertex(bare.element(k).tgt)));
    GradedAlgebra<K> out(std::move(basis), std::move(products), std::move(idem),
                         std::make_pair(cy, std::move(trace)));
    require(is_zero_matrix(Mat<K>(out.frobenius()->pairing - pairing)), errc::invariant,
            "algebra: frobenius pairing does not match the products and recovered trace");
    return out;
}

// --- square-zero modules --------------------------------------------------

// {"d": 2, "dims": {"0": 1, "1": 2, "2": 1, "3": 1},
//  "differential": {"1": [["1", "0"]]},
//  "epsilon": {"0": [["1"]], "1": [["1", "0"]]}}
// dims maps degree to generator count. The two map objects are keyed by
// source degree; each value is the matrix into degree source+1
// (differential) or source+d (epsilon), rows over the target generators and
// columns over the source generators. Degrees absent from a map are zero
// blocks. An optional "side": "right" | "left" tag (default "right") is
// emitted only when it is not the default.
template <class K>
json admodule_to_json(const ADModule<K>& m) {
    json j;
    j["d"] = m.d;
    if (m.side == Side::Left) j["side"] = "left";
    json dims = json::object();
    for (auto& [g, n] : m.space.dims) dims[std::to_string(g)] = n;
    j["dims"] = std::move(dims);
    auto blocks = [](const GradedMap<K>& f) {
        json o = json::object();
        for (auto& [g, b] : f.blocks)
            if (!is_zero_matrix(b)) o[std::to_string(g)] = jsondetail::matrix_to_json(b);
        return o;
    };
    j["differential"] = blocks(m.differential);
    j["epsilon"] = blocks(m.epsilon);
    return j;
}

namespace jsondetail {

// Audit that names the first degree on which a square-zero or commutation
// identity fails, as the CLI error contract asks for.
template <class K>
void audit_module_reporting_degree(const ADModule<K>& m) {
    check_graded_map_shape(m.differential, m.space, m.space, "module differential");
    check_graded_map_shape(m.epsilon, m.space, m.space, "module epsilon");
    auto first_bad = [](const GradedMap<K>& f) -> std::optional<int> {
        for (auto& [n, b] : f.blocks)
            if (!is_zero_matrix(b)) return n;
        return std::nullopt;
    };
    if (auto n = first_bad(compose(m.differential, m.differential)))
        fail(errc::invariant, "module: d^2 != 0, first failure on degree " + std::to_string(*n));
    if (auto n = first_bad(compose(m.epsilon, m.epsilon)))
        fail(errc::invariant, "module: e^2 != 0, first failure on degree " + std::to_string(*n));
    const auto de = compose(m.differential, m.epsilon);
    const auto ed = compose(m.epsilon, m.differential);
    if (auto n = first_bad(add(de, scale(ed, m.d % 2 == 0 ? K(-1) : K(1)))))
        fail(errc::invariant,
             "module: d∘e != (-1)^d e∘d, first failure on degree " + std::to_string(*n));
}

} // namespace jsondetail

template <class K>
ADModule<K> admodule_from_json(const json& j) {
    using jsondetail::as_int;
    using jsondetail::as_int_key;
    using jsondetail::as_string;
    using jsondetail::expect;
    using jsondetail::member;

    const int d = as_int(member(j, "d", "module"), "module 'd'");
    expect(d != 0, "module: 'd' must be nonzero");

    Side side = Side::Right;
    if (j.is_object() && j.contains("side")) {
        const std::string s = as_string(j.at("side"), "module 'side'");
        expect(s == "right" || s == "left", "module: 'side' must be \"right\" or \"left\"");
        side = s == "right" ? Side::Right : Side::Left;
    }

    const json& jd = member(j, "dims", "module");
    expect(jd.is_object(), "module: 'dims' must map degrees to generator counts");
    ADModule<K> m;
    m.d = d;
    m.side = side;
    for (auto& [key, val] : jd.items()) {
        const int g = as_int_key(key, "module dims");
        const int count = as_int(val, "module dims count");
        expect(count >= 1, "module dims: counts must be positive");
        m.space.set(g, count);
    }

    auto read_map = [&](const char* key, int degree) {
        GradedMap<K> f;
        f.degree = degree;
        if (!j.contains(key)) return f;
        const json& o = j.at(key);
        expect(o.is_object(),
               std::string("module: '") + key + "' must map source degrees to matrices");
        for (auto& [k, mat] : o.items()) {
            const int g = as_int_key(k, std::string("module ") + key);
            const std::string what = std::string("module ") + key + " block at degree " + k;
            expect(m.space.dim(g) > 0, what + ": no generators in the source degree");
            f.set_block(g, jsondetail::matrix_from_json<K>(mat, m.space.dim(g + degree),
                                                           m.space.dim(g), what));
        }
        return f;
    };
    m.differential = read_map("differential", 1);
    m.epsilon = read_map("epsilon", d);
    jsondetail::audit_module_reporting_degree(m);
    return m;
}

// --- reports ----------------------------------------------------------------

// {"summands": [[n, shift, multiplicity], ...], "compact": bool}
inline json decomposition_to_json(const DecompositionReport& r) {
    json s = json::array();
    for (auto& [n, shift, count] : r.grouped()) s.push_back(json::array({n, shift, count}));
    json j;
    j["summands"] = s;
    j["compact"] = r.compact;
    return j;
}

inline std::string decomposition_to_table(const DecompositionReport& r) {
    std::string s;
    for (auto& [n, shift, count] : r.grouped()) {
        if (!s.empty()) s += ", ";
        s += "(" + std::to_string(n) + "," + std::to_string(shift) + ")x" + std::to_string(count);
    }
    if (s.empty()) s = "empty";
    return s + "; compact: " + (r.compact ? "true" : "false");
}

// {"perDegree": [[degree, dim], ...], "total": int}
template <class K>
json profile_to_json(const IntersectionProfile<K>& p) {
    json a = json::array();
    for (auto& [deg, dim] : p.per_degree)
        if (dim != 0) a.push_back(json::array({deg, dim}));
    json j;
    j["perDegree"] = a;
    j["total"] = p.total;
    return j;
}

// {"positions": {"0": [{"idem": 0, "shift": 0}], "1": [{"idem": 1, "shift": 1}]},
//  "alphas": {"0,1": [[[["a1", "1"]]]]}}
// A summand at position i is the projective of vertex `idem` placed in
// internal shift `shift`; the total shift of the flattened form is
// shift - i. alphas["i,j"] is the differential component from position i to
// position j, rows over the position-j summands and columns over the
// position-i summands, each entry a list of [basisLabel, "coeff"] terms
// (empty list = zero). Export recovers positions as the longest-path
// layering of the entry digraph; import requires i < j on every block and
// runs the full object audit (entry degrees, vertex support, Maurer-Cartan,
// acyclicity), so only genuine one-sided twisted complexes round-trip.
template <class K>
json object_to_json(const Object<K>& x) {
    const std::vector<int> level = layering(x);
    std::map<int, std::vector<int>> at; // position -> flat summand indices
    for (int s = 0; s < x.size(); ++s) at[level[static_cast<std::size_t>(s)]].push_back(s);

    std::vector<std::pair<int, int>> pos(static_cast<std::size_t>(x.size()));
    json positions = json::object();
    for (auto& [i, list] : at) {
        json arr = json::array();
        for (std::size_t a = 0; a < list.size(); ++a) {
            pos[static_cast<std::size_t>(list[a])] = {i, static_cast<int>(a)};
            const auto& s = x.summands[static_cast<std::size_t>(list[a])];
            json one;
            one["idem"] = s.idem;
            one["shift"] = s.u + i;
            arr.push_back(std::move(one));
        }
        positions[std::to_string(i)] = std::move(arr);
    }

    std::map<std::pair<int, int>, json> blocks;
    for (auto& [st, elem] : x.d) {
        const auto [i, a] = pos[static_cast<std::size_t>(st.first)];
        const auto [k, b] = pos[static_cast<std::size_t>(st.second)];
        auto blk = blocks.find({i, k});
        if (blk == blocks.end()) {
            json zero = json::array();
            for (std::size_t r = 0; r < at[k].size(); ++r) {
                json row = json::array();
                for (std::size_t c = 0; c < at[i].size(); ++c) row.push_back(json::array());
                zero.push_back(std::move(row));
            }
            blk = blocks.emplace(std::pair<int, int>{i, k}, std::move(zero)).first;
        }
        json terms = json::array();
        for (auto& [bi, c] : elem.terms)
            terms.push_back(json::array({x.alg->element(bi).label, field_to_string(c)}));
        blk->second.at(static_cast<std::size_t>(b)).at(static_cast<std::size_t>(a)) =
            std::move(terms);
    }
    json alphas = json::object();
    for (auto& [ik, mat] : blocks)
        alphas[std::to_string(ik.first) + "," + std::to_string(ik.second)] = std::move(mat);

    json j;
    j["positions"] = std::move(positions);
    j["alphas"] = std::move(alphas);
    return j;
}

template <class K>
Object<K> object_from_json(const GradedAlgebra<K>& alg, const json& j) {
    using jsondetail::as_int;
    using jsondetail::as_int_key;
    using jsondetail::as_string;
    using jsondetail::expect;
    using jsondetail::member;

    std::map<std::string, int> by_label;
    for (int i = 0; i < alg.size(); ++i)
        expect(by_label.emplace(alg.element(i).label, i).second,
               "object: algebra basis labels are not distinct");

    const json& jp = member(j, "positions", "object");
    expect(jp.is_object(), "object: 'positions' must map position indices to summand lists");
    std::map<int, std::vector<std::pair<int, int>>> at; // position -> (vertex, shift)
    for (auto& [key, val] : jp.items()) {
        const int i = as_int_key(key, "object positions");
        expect(val.is_array() && !val.empty(),
               "object position " + key + ": expected a nonempty array of summands");
        auto& list = at[i];
        for (auto& s : val) {
            const int v = as_int(member(s, "idem", "object summand"), "object summand 'idem'");
            expect(v >= 0 && v < alg.vertex_count(), "object summand: vertex index out of range");
            list.push_back(
                {v, as_int(member(s, "shift", "object summand"), "object summand 'shift'")});
        }
    }

    Object<K> x;
    x.alg = &alg;
    std::map<int, int> first_flat; // position -> flat index of its first summand
    for (auto& [i, list] : at) {
        first_flat[i] = x.size();
        for (auto& [v, sh] : list) x.summands.push_back({v, sh - i});
    }

    if (j.contains("alphas") && !j.at("alphas").is_null()) {
        const json& ja = j.at("alphas");
        expect(ja.is_object(), "object: 'alphas' must be keyed by \"i,j\" position pairs");
        for (auto& [key, mat] : ja.items()) {
            const auto comma = key.find(',');
            expect(comma != std::string::npos && comma > 0 && comma + 1 < key.size(),
                   "object alphas: key '" + key + "' is not of the form \"i,j\"");
            const int i = as_int_key(key.substr(0, comma), "object alphas");
            const int k = as_int_key(key.substr(comma + 1), "object alphas");
            expect(at.count(i) != 0 && at.count(k) != 0,
                   "object alphas '" + key + "': unknown position");
            require(i < k, errc::invariant,
                    "object alphas '" + key + "': positions must strictly increase");
            const int rows = static_cast<int>(at[k].size());
            const int cols = static_cast<int>(at[i].size());
            expect(mat.is_array() && static_cast<int>(mat.size()) == rows,
                   "object alphas '" + key + "': expected " + std::to_string(rows) + " rows");
            for (int b = 0; b < rows; ++b) {
                const json& row = mat.at(static_cast<std::size_t>(b));
                expect(row.is_array() && static_cast<int>(row.size()) == cols,
                       "object alphas '" + key + "': row " + std::to_string(b) +
                           " must have " + std::to_string(cols) + " entries");
                for (int a = 0; a < cols; ++a) {
                    const json& entry = row.at(static_cast<std::size_t>(a));
                    expect(entry.is_array(),
                           "object alphas '" + key + "': entries must be term lists");
                    std::map<int, K> acc;
                    for (auto& term : entry) {
                        expect(term.is_array() && term.size() == 2,
                               "object alphas '" + key +
                                   "': term must be [basisLabel, \"coeff\"]");
                        const std::string label =
                            as_string(term.at(0), "object alphas basis label");
                        const auto it = by_label.find(label);
                        expect(it != by_label.end(),
                               "object alphas: unknown basis label '" + label + "'");
                        acc[it->second] += field_from_string<K>(
                            as_string(term.at(1), "object alphas coefficient"));
                    }
                    AlgElem<K> e;
                    for (auto& [bi, c] : acc)
                        if (!is_zero(c)) e.terms.push_back({bi, c});
                    if (!e.is_zero_elem())
                        x.set_entry(first_flat[i] + a, first_flat[k] + b, std::move(e));
                }
            }
        }
    }
    object_audit(x, "object");
    return x;
}

// --- words and certificates ---------------------------------------------

// [[generator, exponent], ...], leftmost letter first; the rightmost letter
// acts first, matching apply_word.
inline json word_to_json(const TwistWord& w) {
    json a = json::array();
    for (auto& [g, e] : w.letters) a.push_back(json::array({g, e}));
    return a;
}

inline TwistWord word_from_json(const json& j) {
    using jsondetail::as_int;
    using jsondetail::expect;
    expect(j.is_array(), "word: expected an array of [generator, exponent] pairs");
    TwistWord w;
    for (auto& l : j) {
        expect(l.is_array() && l.size() == 2, "word letter: expected [generator, exponent]");
        w.letters.push_back({as_int(l.at(0), "word generator"), as_int(l.at(1), "word exponent")});
    }
    return w;
}

inline json certificate_to_json(const PingPongCertificate& c) {
    json orbit = json::array();
    for (auto& s : c.sampled_orbit) {
        json classes = json::array();
        for (auto& [v, u] : s.classes) classes.push_back(json::array({v, u}));
        json o;
        o["word"] = word_to_json(s.word);
        o["classes"] = classes;
        o["inW1"] = s.in_w1;
        orbit.push_back(o);
    }
    json trace = json::array();
    for (auto& t : c.inequality_trace) {
        json o;
        o["word"] = word_to_json(t.word);
        o["lhs"] = t.lhs;
        o["rhs"] = t.rhs;
        trace.push_back(o);
    }
    json j;
    j["verdict"] = "free";
    j["maxWordLength"] = c.max_word_length;
    j["wordsChecked"] = c.words_checked;
    j["sampledOrbit"] = orbit;
    j["inequalityTrace"] = trace;
    return j;
}

// {"kind": "Commuting" | "Braid" | "Free", "intersection": int,
//  "shiftWitness": int | null, "certificate": {...} | null}
inline json classification_to_json(const PairClassification& r) {
    json j;
    j["kind"] = to_string(r.kind);
    j["intersection"] = r.intersection;
    j["shiftWitness"] = r.shift_witness ? json(*r.shift_witness) : json(nullptr);
    j["certificate"] = r.certificate ? certificate_to_json(*r.certificate) : json(nullptr);
    return j;
}

} // namespace sphertwist
