// Command-line front end: decomposition, twisting, pair classification,
// inequality fuzzing, and ping-pong certification, with reproducible seeds
// and machine-readable output. Exit codes follow the errc contract:
// 0 ok, 1 soundness, 2 usage/schema, 3 invariant, 4 not-distinct,
// 5 precondition.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "sphertwist/json_io.hpp"

namespace st = sphertwist;

namespace {

struct RunConfig {
    std::string field = "GF:32003";
    std::uint64_t seed = 0;
    int max_word_len = 6;
    int size_cap = 10000;
    std::string format = "json";
    std::string out;
};

int thread_budget() {
    int budget = 4;
    if (const char* s = std::getenv("SPHERTWIST_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(s, &end, 10);
        st::require(end != s && *end == '\0' && v >= 1, st::errc::usage,
                    "SPHERTWIST_THREADS must be a positive integer");
        budget = static_cast<int>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    if (hw >= 1 && budget > static_cast<int>(hw)) budget = static_cast<int>(hw);
    return budget;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    st::require(f.good(), st::errc::usage, "cannot read input file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(cfg.out, std::ios::binary);
    st::require(f.good(), st::errc::usage, "cannot open output file: " + cfg.out);
    f << text;
    f.flush();
    st::require(f.good(), st::errc::usage, "cannot write output file: " + cfg.out);
}

void emit_json(const RunConfig& cfg, const st::json& j) { emit(cfg, j.dump(2) + "\n"); }

// Dispatch on the --field flag; the callable sees a default-constructed
// scalar of the selected field type.
template <class F>
int with_field(const RunConfig& cfg, F&& f) {
    if (cfg.field == "Q") return f(st::Rational{});
    if (cfg.field.rfind("GF:", 0) == 0) {
        const std::string ps = cfg.field.substr(3);
        char* end = nullptr;
        const unsigned long long p = std::strtoull(ps.c_str(), &end, 10);
        st::require(!ps.empty() && end == ps.c_str() + ps.size() && p >= 2 && p <= 0x7fffffffULL,
                    st::errc::usage, "bad field spec '" + cfg.field + "'");
        st::Fp::set_modulus(static_cast<std::uint32_t>(p)); // validates primality
        return f(st::Fp{});
    }
    st::fail(st::errc::usage,
             "unknown field '" + cfg.field + "' (expected \"Q\" or \"GF:p\" with p prime)");
}

int vertex_index(const st::MultiGraph& g, const std::string& label) {
    for (std::size_t i = 0; i < g.vertices.size(); ++i)
        if (g.vertices[i] == label) return static_cast<int>(i);
    st::fail(st::errc::usage, "unknown vertex '" + label + "'");
}

// --- decompose ------------------------------------------------------------

template <class K>
int run_decompose(const RunConfig& cfg, const std::string& file) {
    const st::json j = st::parse_json_text(slurp(file), file);
    const st::ADModule<K> m = st::admodule_from_json<K>(j);
    const st::DecompositionReport rep = st::decompose(m);
    if (cfg.format == "table")
        emit(cfg, st::decomposition_to_table(rep) + "\n");
    else
        emit_json(cfg, st::decomposition_to_json(rep));
    return 0;
}

// --- twist ----------------------------------------------------------------

template <class K>
std::string object_to_table(const st::Object<K>& x) {
    const auto& g = *x.alg;
    std::string s;
    for (int i = 0; i < x.size(); ++i) {
        if (i) s += " + ";
        s += "P" + g.element(g.idempotent_of_vertex(x.summands[static_cast<std::size_t>(i)].idem))
                       .label.substr(1);
        const int u = x.summands[static_cast<std::size_t>(i)].u;
        if (u != 0) s += "[" + std::to_string(u) + "]";
    }
    if (s.empty()) s = "0";
    return s;
}

template <class K>
int run_twist(const RunConfig& cfg, const std::string& graph_file, const std::string& vertex,
              int k, const std::string& target) {
    const st::MultiGraph g = st::graph_from_json(st::parse_json_text(slurp(graph_file), graph_file));
    const auto alg = st::build_zigzag<K>(g);
    const int v = vertex_index(g, vertex);
    const int t = target.empty() ? v : vertex_index(g, target);
    const auto e = st::projective_spherical(alg, v);
    const st::Object<K> m = st::projective_spherical(alg, t).object;
    const st::Object<K> r = st::twist_power(e, k, m);
    const auto sh = st::iso_up_to_shift(r, m);

    if (cfg.format == "table") {
        std::string s = "T(P" + g.vertices[static_cast<std::size_t>(v)] + ")^" +
                        std::to_string(k) + " applied to P" +
                        g.vertices[static_cast<std::size_t>(t)] + "\n";
        s += "object: " + object_to_table(r) + "\n";
        for (auto& [st_pair, elem] : r.d)
            s += "entry " + std::to_string(st_pair.first) + " -> " +
                 std::to_string(st_pair.second) + ": " + alg.describe(elem) + "\n";
        s += sh ? "shift: target[" + std::to_string(sh->first) + "]\n" : "shift: none\n";
        for (std::size_t w = 0; w < g.vertices.size(); ++w) {
            const auto p = st::intersection_number(
                r, st::projective_spherical(alg, static_cast<int>(w)).object);
            s += "i(., P" + g.vertices[w] + ") = " + std::to_string(p.total) + " {";
            bool first = true;
            for (auto& [deg, dim] : p.per_degree) {
                if (dim == 0) continue;
                if (!first) s += ", ";
                s += std::to_string(deg) + ":" + std::to_string(dim);
                first = false;
            }
            s += "}\n";
        }
        emit(cfg, s);
        return 0;
    }

    st::json j;
    j["vertex"] = g.vertices[static_cast<std::size_t>(v)];
    j["k"] = k;
    j["target"] = g.vertices[static_cast<std::size_t>(t)];
    j["object"] = st::object_to_json(r);
    j["shift"] = sh ? st::json(sh->first) : st::json(nullptr);
    st::json profiles = st::json::array();
    for (std::size_t w = 0; w < g.vertices.size(); ++w) {
        const auto p = st::intersection_number(
            r, st::projective_spherical(alg, static_cast<int>(w)).object);
        st::json o;
        o["vertex"] = g.vertices[w];
        o["profile"] = st::profile_to_json(p);
        profiles.push_back(o);
    }
    j["profiles"] = profiles;
    emit_json(cfg, j);
    return 0;
}

// --- classify ---------------------------------------------------------------

template <class K>
int run_classify(const RunConfig& cfg, const std::string& graph_file, const std::string& vl,
                 const std::string& wl) {
    const st::MultiGraph g = st::graph_from_json(st::parse_json_text(slurp(graph_file), graph_file));
    const auto alg = st::build_zigzag<K>(g);
    const auto e1 = st::projective_spherical(alg, vertex_index(g, vl));
    const auto e2 = st::projective_spherical(alg, vertex_index(g, wl));
    const st::PairClassification r =
        st::classify_pair(e1, e2, cfg.max_word_len, cfg.size_cap, thread_budget());

    if (cfg.format == "table") {
        std::string s;
        switch (r.kind) {
        case st::PairKind::Commuting: s = "Commuting(ZxZ)"; break;
        case st::PairKind::Braid:
            s = "Braid(B3), l=" + std::to_string(r.shift_witness.value_or(0));
            break;
        case st::PairKind::Free:
            s = "Free(F2), certificate: OK@len" +
                std::to_string(r.certificate ? r.certificate->max_word_length : cfg.max_word_len);
            break;
        }
        emit(cfg, s + "\n");
        return 0;
    }
    emit_json(cfg, st::classification_to_json(r));
    return 0;
}

// --- fuzz-inequality ----------------------------------------------------

template <class K>
int run_fuzz(const RunConfig& cfg, int count, int max_vertices, int max_edges) {
    const auto entries = st::corpus(cfg.seed, max_vertices, max_edges, count);
    long long checks = 0;
    st::json failures = st::json::array();
    static const int powers[] = {1, -1, 2, -2, 3, -3};
    for (std::size_t ei = 0; ei < entries.size(); ++ei) {
        const auto& entry = entries[ei];
        const auto alg = st::build_zigzag<K>(entry.graph);
        const int nv = static_cast<int>(entry.graph.vertices.size());
        std::vector<st::Object<K>> projectives;
        projectives.reserve(static_cast<std::size_t>(nv));
        for (int w = 0; w < nv; ++w)
            projectives.push_back(st::projective_spherical(alg, w).object);
        for (int c : entry.chosen) {
            const auto e = st::projective_spherical(alg, c);
            for (int m = 0; m < nv; ++m)
                for (int n = 0; n < nv; ++n)
                    for (int k : powers) {
                        const auto rep = st::check_fundamental_inequality(
                            e, projectives[static_cast<std::size_t>(m)],
                            projectives[static_cast<std::size_t>(n)], k);
                        ++checks;
                        if (rep.holds) continue;
                        st::json f;
                        f["graph"] = st::graph_to_json(entry.graph);
                        f["twist"] = entry.graph.vertices[static_cast<std::size_t>(c)];
                        f["m"] = entry.graph.vertices[static_cast<std::size_t>(m)];
                        f["n"] = entry.graph.vertices[static_cast<std::size_t>(n)];
                        f["k"] = k;
                        f["lhs"] = rep.lhs;
                        f["rhs"] = rep.rhs;
                        failures.push_back(f);
                    }
        }
    }
    if (cfg.format == "table") {
        emit(cfg, std::to_string(checks) + " checks, " + std::to_string(failures.size()) +
                      " violations\n");
    } else {
        st::json j;
        j["checks"] = checks;
        j["violations"] = failures.size();
        j["failures"] = failures;
        emit_json(cfg, j);
    }
    return failures.empty() ? 0 : 1;
}

// --- pingpong ---------------------------------------------------------------

template <class K>
int run_pingpong(const RunConfig& cfg, const std::string& graph_file, const std::string& vl,
                 const std::string& wl, int k1, int k2) {
    const st::MultiGraph g = st::graph_from_json(st::parse_json_text(slurp(graph_file), graph_file));
    const auto alg = st::build_zigzag<K>(g);
    const auto e1 = st::projective_spherical(alg, vertex_index(g, vl));
    const auto e2 = st::projective_spherical(alg, vertex_index(g, wl));
    const int i = st::intersection_number(e1.object, e2.object).total;
    if (i < 2) {
        std::cerr << "i=" << i << ": " << (i == 1 ? "braid" : "commuting") << " case\n";
        return static_cast<int>(st::errc::precondition);
    }
    const st::PingPongCertificate cert =
        st::pingpong_verify(e1, k1, e2, k2, cfg.max_word_len, cfg.size_cap, thread_budget());
    if (cfg.format == "table") {
        emit(cfg, "OK@len" + std::to_string(cert.max_word_length) + ": " +
                      std::to_string(cert.words_checked) + " words checked\n");
    } else {
        emit_json(cfg, st::certificate_to_json(cert));
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact spherical-twist calculator over zig-zag algebras"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string file, graph_file, vertex, target, v_label, w_label;
    int k = 1, k1 = 1, k2 = 1;
    int count = 8, max_vertices = 4, max_edges = 5;

    auto add_common = [&](CLI::App* s) {
        s->add_option("--field", cfg.field, "coefficient field: \"Q\" or \"GF:p\", p prime")
            ->capture_default_str();
        s->add_option("--seed", cfg.seed, "seed for randomized sweeps")->capture_default_str();
        s->add_option("--max-word-len", cfg.max_word_len, "certificate word-length bound")
            ->capture_default_str();
        s->add_option("--size-cap", cfg.size_cap, "summand-count cap for twisted complexes")
            ->capture_default_str();
        s->add_option("--format", cfg.format, "output format")
            ->check(CLI::IsMember({"json", "table"}))
            ->capture_default_str();
        s->add_option("--out", cfg.out, "write output to this file instead of stdout");
    };

    CLI::App* dec = app.add_subcommand("decompose",
                                       "split a square-zero module into elementary summands");
    dec->add_option("file", file, "module JSON file")->required();
    add_common(dec);

    CLI::App* tw = app.add_subcommand("twist", "twist a vertex projective and print the result");
    tw->add_option("graph", graph_file, "graph JSON file")->required();
    tw->add_option("--vertex", vertex, "twisting vertex label")->required();
    tw->add_option("--k", k, "twist power, nonzero")->capture_default_str();
    tw->add_option("--target", target, "vertex whose projective is twisted (default: --vertex)");
    add_common(tw);

    CLI::App* cl = app.add_subcommand("classify",
                                      "identify the group generated by two vertex twists");
    cl->add_option("graph", graph_file, "graph JSON file")->required();
    cl->add_option("--v", v_label, "first vertex label")->required();
    cl->add_option("--w", w_label, "second vertex label")->required();
    add_common(cl);

    CLI::App* fz = app.add_subcommand(
        "fuzz-inequality", "sweep the twisted intersection-number inequality over a corpus");
    fz->add_option("--count", count, "corpus size (first three entries are pinned)")
        ->capture_default_str();
    fz->add_option("--max-vertices", max_vertices, "vertex bound for random graphs")
        ->capture_default_str();
    fz->add_option("--max-edges", max_edges, "edge bound for random graphs")
        ->capture_default_str();
    add_common(fz);

    CLI::App* pp = app.add_subcommand("pingpong",
                                      "emit a free-group certificate for two twist powers");
    pp->add_option("graph", graph_file, "graph JSON file")->required();
    pp->add_option("--v", v_label, "first vertex label")->required();
    pp->add_option("--w", w_label, "second vertex label")->required();
    pp->add_option("--k1", k1, "power of the first twist")->capture_default_str();
    pp->add_option("--k2", k2, "power of the second twist")->capture_default_str();
    add_common(pp);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(sphertwist::errc::usage);
    }

    try {
        return with_field(cfg, [&](auto tag) -> int {
            using K = std::decay_t<decltype(tag)>;
            if (dec->parsed()) return run_decompose<K>(cfg, file);
            if (tw->parsed()) return run_twist<K>(cfg, graph_file, vertex, k, target);
            if (cl->parsed()) return run_classify<K>(cfg, graph_file, v_label, w_label);
            if (fz->parsed()) return run_fuzz<K>(cfg, count, max_vertices, max_edges);
            if (pp->parsed()) return run_pingpong<K>(cfg, graph_file, v_label, w_label, k1, k2);
            st::fail(st::errc::usage, "no subcommand selected");
        });
    } catch (const st::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 70;
    }
}
