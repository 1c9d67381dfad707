#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "oi/commutative.hpp"
#include "oi/formula.hpp"
#include "oi/fv.hpp"
#include "oi/invariance.hpp"
#include "oi/structure.hpp"
#include "oi/tree.hpp"
#include "oi/tree_automaton.hpp"
#include "oi/types.hpp"

using namespace oi;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

const char* yesno(bool b) { return b ? "true" : "false"; }

Guards load_config(const std::string& path) {
    Guards g;
    if (path.empty()) return g;
    std::istringstream in(slurp(path));
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw input_error(path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = line.substr(0, eq);
        long long value = 0;
        try {
            value = std::stoll(line.substr(eq + 1));
        } catch (const std::exception&) {
            throw input_error(path + ":" + std::to_string(lineno) + ": bad number");
        }
        if (value <= 0)
            throw input_error(path + ":" + std::to_string(lineno) + ": caps must be positive");
        int v = static_cast<int>(value);
        if (key == "max_size_fo") g.max_size_fo = v;
        else if (key == "max_rank_fo") g.max_rank_fo = v;
        else if (key == "max_size_mso") g.max_size_mso = v;
        else if (key == "max_rank_mso") g.max_rank_mso = v;
        else if (key == "ef_max_size") g.ef_max_size = v;
        else if (key == "ef_max_rank_mso") g.ef_max_rank_mso = v;
        else if (key == "enum_bits_cap") g.enum_bits_cap = v;
        else if (key == "order_cap") g.order_cap = value;
        else if (key == "materialize_max_rank") g.materialize_max_rank = v;
        else if (key == "materialize_max_relations") g.materialize_max_relations = v;
        else if (key == "parikh_seq_cap") g.parikh_seq_cap = value;
        else if (key == "eval_max_set_domain") g.eval_max_set_domain = v;
        else throw input_error(path + ":" + std::to_string(lineno) + ": unknown key " + key);
    }
    return g;
}

LogicKind parse_logic(const std::string& s) {
    if (s == "FO") return LogicKind::FO;
    if (s == "MSO") return LogicKind::MSO;
    throw input_error("logic must be FO or MSO");
}

std::vector<std::string> parse_alphabet(const std::string& csv) {
    std::vector<std::string> out;
    std::istringstream in(csv);
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty()) out.push_back(item);
    if (out.empty()) throw input_error("empty alphabet");
    return out;
}

// vocabulary implied by the relation atoms of a sentence, minus the order
Vocabulary infer_vocabulary(const Formula& f) {
    std::map<std::string, int> rels;
    for (int i = 0; i < f.num_nodes(); ++i) {
        const Formula::Node& n = f.node(i);
        if (n.kind != FKind::Rel) continue;
        int arity = static_cast<int>(n.args.size());
        auto [it, fresh] = rels.emplace(n.rel, arity);
        if (!fresh && it->second != arity)
            throw input_error("relation " + n.rel + " used with two arities");
    }
    Vocabulary v;
    for (const auto& [name, arity] : rels) v.relations.emplace_back(name, arity);
    v.validate();
    return v;
}

std::string word_text(const Dfa& m, const std::vector<int>& word) {
    if (word.empty()) return "eps";
    std::string out;
    for (int l : word) out += m.alphabet[l];
    return out;
}

// ---------------------------------------------------------------------------
// corpus verify: the full example battery as one deterministic report

struct CorpusOptions {
    std::string dir = "corpus";
    unsigned seed = 0;
    int jobs = 1;
};

Dfa corpus_dfa(const CorpusOptions& opt, const std::string& name) {
    return parse_dfa(slurp(opt.dir + "/" + name));
}

void corpus_verify(const CorpusOptions& opt, const Guards& guards,
                   std::vector<std::string>& out) {
    out.push_back("RESULT corpus-seed " + std::to_string(opt.seed));

    // structures and formulas evaluate
    {
        Structure s = parse_structure(slurp(opt.dir + "/structure_path3.txt"));
        Structure c = parse_structure(slurp(opt.dir + "/structure_cycle4.txt"));
        Formula f = parse_formula(slurp(opt.dir + "/formula_exists_edge.sexpr"));
        Formula g = parse_formula(slurp(opt.dir + "/formula_even_card.sexpr"));
        out.push_back(std::string("RESULT eval path3 exists-edge ") + yesno(evaluate(s, f)));
        out.push_back(std::string("RESULT eval cycle4 exists-edge ") + yesno(evaluate(c, f)));
        out.push_back(std::string("RESULT eval path3 even-card ") + yesno(evaluate(s, g)));
        out.push_back(std::string("RESULT eval cycle4 even-card ") + yesno(evaluate(c, g)));
    }

    // parity sentence battery
    {
        Formula f = phi_even();
        InvarianceVerdict v = check_invariance(f, Vocabulary{}, 4, guards);
        out.push_back(std::string("RESULT phi-even invariant-up-to 4 ") + yesno(v.invariant));
        std::string pattern;
        for (int n = 1; n <= 8; ++n)
            pattern += query_membership(f, Structure(Vocabulary{}, n), guards) ? 't' : 'f';
        out.push_back("RESULT phi-even sizes-1-8 " + pattern);
        Formula div3 = order_divisibility_sentence(3, parse_formula("(= x x)"));
        pattern.clear();
        for (int n = 1; n <= 9; ++n)
            pattern += query_membership(div3, Structure(Vocabulary{}, n), guards) ? 't' : 'f';
        out.push_back("RESULT div3 sizes-1-9 " + pattern);
    }

    // commutative languages
    {
        Dfa mod = corpus_dfa(opt, "dfa_mod2a_mod3b.txt");
        Dfa ab = corpus_dfa(opt, "dfa_astar_bstar.txt");
        out.push_back(std::string("RESULT commutative mod2a-mod3b ") +
                      yesno(is_commutative(mod)));
        out.push_back(std::string("RESULT commutative astar-bstar ") +
                      yesno(is_commutative(ab)));
        auto w = commutativity_witness(ab);
        if (w)
            out.push_back("COUNTEREXAMPLE astar-bstar witness=" + word_text(ab, w->first) +
                          "/" + word_text(ab, w->second));
        out.push_back("RESULT parikh mod2a-mod3b " +
                      parikh_decompose(mod, true, guards).to_text());
        // seeded random sample against the brute-force oracle
        std::mt19937 rng(opt.seed);
        int agree = 0;
        const int trials = 20;
        for (int trial = 0; trial < trials; ++trial) {
            int n = static_cast<int>(rng() % 4) + 1;
            Dfa m;
            m.alphabet = {"a", "b"};
            m.num_states = n;
            m.initial = 0;
            m.accepting.resize(n);
            m.trans.assign(n, std::vector<int>(2));
            for (int q = 0; q < n; ++q) {
                m.trans[q][0] = static_cast<int>(rng() % n);
                m.trans[q][1] = static_cast<int>(rng() % n);
                m.accepting[q] = rng() & 1;
            }
            bool fast = is_commutative(m);
            bool brute = !commutativity_witness(m).has_value();
            if (fast == brute) ++agree;
        }
        out.push_back("RESULT commutative-random-agreement " + std::to_string(agree) + "/" +
                      std::to_string(trials));
    }

    // tree automaton battery, parallel over trees
    {
        TreeAutomaton ta = parse_tree_automaton(slurp(opt.dir + "/ta_even_a_leaves.txt"));
        out.push_back(std::string("RESULT ta even-a-leaves sibling-invariant ") +
                      yesno(is_sibling_invariant(ta)));
        CountingTreeAutomaton cta = to_counting_automaton(ta, guards);
        std::vector<UnrankedTree> trees = enumerate_trees_up_to(ta.alphabet, 6);
        std::vector<char> ordered(trees.size()), counting(trees.size());
        int jobs = std::max(1, opt.jobs);
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        for (int j = 0; j < jobs; ++j)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < trees.size(); i = next++) {
                    ordered[i] = accepts_unordered(ta, trees[i]);
                    counting[i] = run_counting(cta, trees[i]);
                }
            });
        for (auto& th : pool) th.join();
        int accepted = 0, mismatches = 0;
        for (std::size_t i = 0; i < trees.size(); ++i) {
            accepted += ordered[i];
            mismatches += ordered[i] != counting[i];
        }
        out.push_back("RESULT ta even-a-leaves accepted " + std::to_string(accepted) + "/" +
                      std::to_string(trees.size()));
        out.push_back("RESULT ta counting-mismatches " + std::to_string(mismatches));
        // seeded sibling-order sampling on a corpus tree
        UnrankedTree t = parse_tree(slurp(opt.dir + "/tree_mixed.txt"), ta.alphabet);
        std::vector<SiblingOrder> orders = enumerate_sibling_orders(t, guards);
        std::mt19937 rng(opt.seed);
        bool stable = true;
        bool ref = accepts_unordered(ta, t);
        for (int i = 0; i < 10; ++i) {
            const SiblingOrder& o = orders[rng() % orders.size()];
            stable &= run(ta, t, o).accepted == ref;
        }
        out.push_back(std::string("RESULT ta sampled-order-stability ") + yesno(stable));
    }

    // synthesis and composition
    {
        SynthResult r = synthesize_invariant_type_ta({"a"}, 1, LogicKind::FO, 4, guards);
        out.push_back("RESULT ta-synth a-rank1 states " +
                      std::to_string(r.automaton.num_states()));
        out.push_back(std::string("RESULT ta-synth a-rank1 functional ") +
                      yesno(r.diagnostics.functional_consistent));
        FvBuild b = build_composition_table(CompositionOp::Union, Vocabulary{{{"P", 1}}, {}},
                                            1, LogicKind::FO, 2, guards);
        out.push_back(std::string("RESULT fv union-P-rank1 functional ") +
                      yesno(b.diagnostics.functional));
        out.push_back("RESULT fv union-P-rank1 entries " +
                      std::to_string(b.table.entries.size()));
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"order-invariance toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    unsigned seed = 0;
    int jobs = 1;
    app.add_option("--config", config_path, "key=value guard overrides");
    app.add_option("--seed", seed, "seed for sampled checks");
    app.add_option("--jobs", jobs, "worker threads for sweeps");

    std::string structure_path, structure_b_path, formula_path, formula_b_path;
    std::string dfa_path, ta_path, tree_path, logic_str = "FO", op_str = "union";
    std::string alphabet_csv = "a,b", corpus_dir = "corpus", rel_spec = "E/2";
    int rank = 1, rounds = 1, max_size = 3;
    bool require_commutative = false, dfs_order = false;

    CLI::App* c_eval = app.add_subcommand("eval", "evaluate a sentence on a structure");
    c_eval->add_option("--structure", structure_path)->required();
    c_eval->add_option("--formula", formula_path)->required();

    CLI::App* c_type = app.add_subcommand("type", "canonical rank-k type of a structure");
    c_type->add_option("--structure", structure_path)->required();
    c_type->add_option("--rank", rank);
    c_type->add_option("--logic", logic_str);

    CLI::App* c_ef = app.add_subcommand("ef", "k-round game equivalence of two structures");
    c_ef->add_option("--left", structure_path)->required();
    c_ef->add_option("--right", structure_b_path)->required();
    c_ef->add_option("--rounds", rounds);
    c_ef->add_option("--logic", logic_str);

    CLI::App* c_inv = app.add_subcommand("inv-type", "invariant type within a bounded universe");
    c_inv->add_option("--structure", structure_path)->required();
    c_inv->add_option("--rank", rank);
    c_inv->add_option("--logic", logic_str);
    c_inv->add_option("--max-size", max_size);

    CLI::App* c_chk = app.add_subcommand("check-invariance", "order-invariance of a sentence");
    c_chk->add_option("--formula", formula_path)->required();
    c_chk->add_option("--max-size", max_size);

    CLI::App* c_comm = app.add_subcommand("commutative", "permutation closure of a DFA language");
    c_comm->add_option("--dfa", dfa_path)->required();

    CLI::App* c_parikh = app.add_subcommand("parikh", "semilinear Parikh decomposition");
    c_parikh->add_option("--dfa", dfa_path)->required();
    c_parikh->add_flag("--require-commutative", require_commutative);

    CLI::App* c_tarun = app.add_subcommand("ta-run", "run a tree automaton on a tree");
    c_tarun->add_option("--ta", ta_path)->required();
    c_tarun->add_option("--tree", tree_path)->required();

    CLI::App* c_tainv = app.add_subcommand("ta-check-invariant", "sibling invariance of a TA");
    c_tainv->add_option("--ta", ta_path)->required();

    CLI::App* c_tacnt = app.add_subcommand("ta-to-counting", "counting form of an invariant TA");
    c_tacnt->add_option("--ta", ta_path)->required();

    CLI::App* c_synth = app.add_subcommand("ta-synth", "invariant-type automaton from trees");
    c_synth->add_option("--alphabet", alphabet_csv);
    c_synth->add_option("--rank", rank);
    c_synth->add_option("--logic", logic_str);
    c_synth->add_option("--max-size", max_size);

    CLI::App* c_cour = app.add_subcommand("courcelle-check",
                                          "counting vs ordered sentence on trees");
    c_cour->add_option("--counting", formula_path)->required();
    c_cour->add_option("--ordered", formula_b_path)->required();
    c_cour->add_flag("--dfs-order", dfs_order,
                     "rewrite lt in the ordered sentence to the dfs macro");
    c_cour->add_option("--alphabet", alphabet_csv);
    c_cour->add_option("--max-size", max_size);

    CLI::App* c_fv = app.add_subcommand("fv-table", "composition table for union/product");
    c_fv->add_option("--op", op_str);
    c_fv->add_option("--rel", rel_spec, "single relation as name/arity");
    c_fv->add_option("--rank", rank);
    c_fv->add_option("--logic", logic_str);
    c_fv->add_option("--max-size", max_size);

    CLI::App* c_corpus = app.add_subcommand("corpus", "shipped example battery");
    std::string corpus_action;
    c_corpus->add_option("action", corpus_action)->required();
    c_corpus->add_option("--dir", corpus_dir);

    CLI11_PARSE(app, argc, argv);

    try {
        Guards guards = load_config(config_path);
        std::vector<std::string> out;

        if (c_eval->parsed()) {
            Structure s = parse_structure(slurp(structure_path));
            Formula f = parse_formula(slurp(formula_path));
            f.check_vocabulary(s.vocab());
            if (!f.free_evars().empty() || !f.free_svars().empty())
                throw input_error("eval: sentence required (free variables present)");
            out.push_back(std::string("RESULT ") + yesno(evaluate(s, f, {}, guards)));
        } else if (c_type->parsed()) {
            Structure s = parse_structure(slurp(structure_path));
            TypeRegistry reg;
            TypeId t = rank_type(s, rank, parse_logic(logic_str), reg, guards);
            out.push_back("RESULT type " + reg.serialize(t));
        } else if (c_ef->parsed()) {
            Structure a = parse_structure(slurp(structure_path));
            Structure b = parse_structure(slurp(structure_b_path));
            bool eq = ef_equivalent(a, b, rounds, parse_logic(logic_str), guards);
            out.push_back(std::string("RESULT equivalent ") + yesno(eq));
        } else if (c_inv->parsed()) {
            Structure s = parse_structure(slurp(structure_path));
            FlipPartition p = build_flip_partition(s.vocab(), rank, parse_logic(logic_str),
                                                   std::max(max_size, s.size()), guards);
            out.push_back("RESULT invariant-type " + invariant_type_of(s, p, guards));
        } else if (c_chk->parsed()) {
            Formula f = parse_formula(slurp(formula_path));
            Vocabulary base = infer_vocabulary(f);
            InvarianceVerdict v = check_invariance(f, base, max_size, guards);
            if (v.invariant) {
                out.push_back("RESULT invariant-up-to " + std::to_string(max_size));
            } else {
                out.push_back("RESULT not-invariant");
                std::string cx = "COUNTEREXAMPLE structure=" + v.structure->serialize() +
                                 " order1=";
                for (int e : v.order1->perm) cx += std::to_string(e);
                cx += " order2=";
                for (int e : v.order2->perm) cx += std::to_string(e);
                out.push_back(cx);
            }
        } else if (c_comm->parsed()) {
            Dfa m = parse_dfa(slurp(dfa_path));
            bool comm = is_commutative(m);
            out.push_back(std::string("RESULT commutative ") + yesno(comm));
            if (!comm) {
                auto w = commutativity_witness(m);
                out.push_back("COUNTEREXAMPLE witness=" + word_text(m, w->first) + "/" +
                              word_text(m, w->second));
            }
        } else if (c_parikh->parsed()) {
            Dfa m = parse_dfa(slurp(dfa_path));
            if (require_commutative && !is_commutative(m)) {
                auto w = commutativity_witness(m);
                std::cout << "DIAG not-commutative witness=" << word_text(m, w->first) << "/"
                          << word_text(m, w->second) << "\n";
                return 1;
            }
            out.push_back("RESULT semilinear " +
                          parikh_decompose(m, require_commutative, guards).to_text());
        } else if (c_tarun->parsed()) {
            TreeAutomaton n = parse_tree_automaton(slurp(ta_path));
            UnrankedTree t = parse_tree(slurp(tree_path), n.alphabet);
            SiblingOrder ord = SiblingOrder::text_order(t);
            bool acc = n.is_deterministic() ? run(n, t, ord).accepted
                                            : run_nondeterministic(n, t, ord);
            out.push_back(std::string("RESULT accepted ") + yesno(acc));
        } else if (c_tainv->parsed()) {
            TreeAutomaton n = parse_tree_automaton(slurp(ta_path));
            out.push_back(std::string("RESULT sibling-invariant ") +
                          yesno(is_sibling_invariant(n)));
        } else if (c_tacnt->parsed()) {
            TreeAutomaton n = parse_tree_automaton(slurp(ta_path));
            CountingTreeAutomaton c = to_counting_automaton(n, guards);
            out.push_back("RESULT counting-automaton");
            out.push_back(c.to_text());
        } else if (c_synth->parsed()) {
            SynthResult r = synthesize_invariant_type_ta(parse_alphabet(alphabet_csv), rank,
                                                         parse_logic(logic_str), max_size,
                                                         guards);
            out.push_back("RESULT states " + std::to_string(r.automaton.num_states()));
            out.push_back(std::string("RESULT functional ") +
                          yesno(r.diagnostics.functional_consistent));
            out.push_back(std::string("RESULT permutation-independent ") +
                          yesno(r.diagnostics.permutation_independent));
            for (const std::string& c : r.diagnostics.conflicts)
                out.push_back("DIAG conflict " + c);
        } else if (c_cour->parsed()) {
            Formula fc = parse_formula(slurp(formula_path));
            Formula fo = parse_formula(slurp(formula_b_path));
            if (dfs_order) fo = with_dfs_order(fo);
            CourcelleVerdict v = courcelle_equivalence_check(fc, fo,
                                                             parse_alphabet(alphabet_csv),
                                                             max_size, guards);
            if (v.equivalent) {
                out.push_back("RESULT equivalent-up-to " + std::to_string(max_size));
            } else if (v.invariance_failure) {
                out.push_back("RESULT ordered-sentence-not-invariant");
                out.push_back("COUNTEREXAMPLE tree=" + v.invariance_failure->tree->to_text());
            } else {
                out.push_back("RESULT not-equivalent");
                out.push_back("COUNTEREXAMPLE tree=" + v.counterexample->to_text());
            }
        } else if (c_fv->parsed()) {
            auto slash = rel_spec.find('/');
            if (slash == std::string::npos) throw input_error("--rel needs name/arity");
            Vocabulary vocab{{{rel_spec.substr(0, slash),
                               std::stoi(rel_spec.substr(slash + 1))}},
                             {}};
            CompositionOp op = op_str == "product" ? CompositionOp::Product
                             : op_str == "union"   ? CompositionOp::Union
                                                   : throw input_error("--op union|product");
            FvBuild b = build_composition_table(op, vocab, rank, parse_logic(logic_str),
                                                max_size, guards);
            out.push_back(std::string("RESULT functional ") + yesno(b.diagnostics.functional));
            for (const std::string& c : b.diagnostics.conflicts)
                out.push_back("DIAG conflict " + c);
            out.push_back(b.table.dump());
        } else if (c_corpus->parsed()) {
            if (corpus_action != "verify")
                throw input_error("corpus: unknown action " + corpus_action);
            CorpusOptions opt;
            opt.dir = corpus_dir;
            opt.seed = seed;
            opt.jobs = jobs;
            corpus_verify(opt, guards, out);
        }

        for (const std::string& line : out) std::cout << line << "\n";
        return 0;
    } catch (const Error& e) {
        std::cout << "DIAG error " << e.what() << "\n";
        return e.kind() == ErrorKind::Guard ? 2 : 1;
    } catch (const std::exception& e) {
        std::cout << "DIAG error " << e.what() << "\n";
        return 1;
    }
}
