#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bwtk/boss.hpp"
#include "bwtk/common.hpp"
#include "bwtk/gap_merge.hpp"
#include "bwtk/lcp_merge.hpp"
#include "bwtk/overlaps.hpp"
#include "bwtk/pipeline.hpp"
#include "bwtk/repeats.hpp"
#include "bwtk/seqio.hpp"

namespace {

bwtk::InputFormat parse_format(const std::string& s) {
    if (s == "lines") return bwtk::InputFormat::Lines;
    if (s == "fasta") return bwtk::InputFormat::Fasta;
    throw CLI::ValidationError("--format", "expected 'lines' or 'fasta'");
}

void print_stats_file(const std::string& path) {
    auto data = bwtk::read_all(path);
    fwrite(data.data(), 1, data.size(), stdout);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"external-memory BWT/LCP/DA toolkit"};
    app.require_subcommand(1);

    // index
    auto* index = app.add_subcommand("index", "build bwt/lcp/da/xlcp from a collection");
    std::string in_path, format = "lines", out_prefix;
    bwtk::IndexConfig icfg;
    bool no_skip = false, no_lcp = false, no_xlcp = false;
    index->add_option("--input", in_path)->required();
    index->add_option("--format", format)->capture_default_str();
    index->add_option("--out", out_prefix)->required();
    index->add_option("--mem-budget", icfg.mem_budget)->capture_default_str();
    index->add_option("--fan-in", icfg.fan_in)->capture_default_str();
    index->add_option("--lcp-fan-in", icfg.lcp_fan_in)->capture_default_str();
    index->add_flag("--semi-external", icfg.semi_external);
    index->add_flag("--no-skipping", no_skip);
    index->add_option("--skip-threshold", icfg.skip_threshold);
    index->add_option("--prefix-depth", icfg.prefix_depth);
    index->add_flag("--no-lcp", no_lcp);
    index->add_flag("--no-xlcp", no_xlcp);
    index->add_flag("--keep", icfg.keep_tmp);

    // merge: standalone gap merge of prebuilt partial bwt/da pairs
    auto* merge = app.add_subcommand("merge", "merge partial bwt/da pairs");
    std::vector<std::string> part_prefixes;
    std::string merge_out;
    bool m_semi = false, m_no_skip = false, m_pairs = true;
    uint64_t m_threshold = 0;
    merge->add_option("--parts", part_prefixes)->required()->expected(-1);
    merge->add_option("--out", merge_out)->required();
    merge->add_flag("--semi-external", m_semi);
    merge->add_flag("--no-skipping", m_no_skip);
    merge->add_option("--skip-threshold", m_threshold);
    merge->add_flag("!--no-pairs", m_pairs);

    // lcp-merge: turn pair files into .lcp/.xlcp
    auto* lcpm = app.add_subcommand("lcp-merge", "k-way merge of lcp pair files");
    std::string lm_pairs, lm_out;
    uint64_t lm_n = 0;
    uint32_t lm_fan_in = 256;
    bool lm_no_xlcp = false;
    lcpm->add_option("--pairs", lm_pairs, "prefix holding <prefix>.pairs.<v>")->required();
    lcpm->add_option("--n", lm_n, "total number of ranks")->required();
    lcpm->add_option("--out", lm_out)->required();
    lcpm->add_option("--fan-in", lm_fan_in)->capture_default_str();
    lcpm->add_flag("--no-xlcp", lm_no_xlcp);

    // repeats
    bwtk::oracle::RepeatParams rprm;
    std::string r_prefix, r_out;
    bool r_text = false;
    auto add_repeat_opts = [&](CLI::App* c) {
        c->add_option("--prefix", r_prefix)->required();
        c->add_option("--out", r_out)->required();
        c->add_option("--min-length", rprm.min_length)->capture_default_str();
        c->add_option("--min-occ", rprm.min_occ)->capture_default_str();
        c->add_flag("--text", r_text);
    };
    auto* rep1 = app.add_subcommand("repeats1", "maximal repeats (distinct left extensions)");
    add_repeat_opts(rep1);
    auto* rep2 = app.add_subcommand("repeats2", "repeats with unique extensions on both sides");
    add_repeat_opts(rep2);

    // overlaps
    auto* ovl = app.add_subcommand("overlaps", "all-pairs suffix-prefix overlaps");
    std::string o_prefix, o_out;
    bwtk::OverlapParams oprm;
    bool o_text = false;
    ovl->add_option("--prefix", o_prefix)->required();
    ovl->add_option("--out", o_out)->required();
    ovl->add_option("--tau", oprm.tau)->capture_default_str();
    ovl->add_flag("--include-self", oprm.include_self);
    ovl->add_flag("--containment", oprm.containment);
    ovl->add_flag("--text", o_text);

    // dbg
    auto* dbg = app.add_subcommand("dbg", "BOSS de Bruijn graph");
    std::string d_prefix, d_out;
    uint32_t d_k = 0;
    bool d_colors = false;
    dbg->add_option("--prefix", d_prefix)->required();
    dbg->add_option("--out", d_out, "output prefix, defaults to --prefix");
    dbg->add_option("--k", d_k)->required()->check(CLI::PositiveNumber);
    dbg->add_flag("--colors", d_colors);

    // verify
    auto* verify = app.add_subcommand("verify", "recompute naively and diff outputs");
    std::string v_input, v_format = "lines", v_prefix;
    bool v_no_lcp = false, v_no_xlcp = false;
    verify->add_option("--input", v_input)->required();
    verify->add_option("--format", v_format)->capture_default_str();
    verify->add_option("--prefix", v_prefix)->required();
    verify->add_flag("--no-lcp", v_no_lcp);
    verify->add_flag("--no-xlcp", v_no_xlcp);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*index) {
            icfg.skipping = !no_skip;
            icfg.want_lcp = !no_lcp;
            icfg.want_xlcp = !no_lcp && !no_xlcp;
            icfg.out_prefix = out_prefix;
            bwtk::Collection coll = bwtk::load_collection(in_path, parse_format(format));
            bwtk::IndexResult res = bwtk::run_index(coll, icfg);
            print_stats_file(res.stats_path);
        } else if (*merge) {
            std::vector<bwtk::PartialArtifact> parts;
            for (const auto& p : part_prefixes) {
                bwtk::PartialArtifact a;
                a.bwt_path = p + ".bwt";
                a.da_path = p + ".da";
                a.size = bwtk::file_size(a.bwt_path);
                parts.push_back(a);
            }
            bwtk::AlphabetMap alpha = bwtk::alphabet_from_bwts(parts);
            bwtk::MergeConfig mc;
            mc.prefix = merge_out;
            mc.semi_external = m_semi;
            mc.skipping = !m_no_skip;
            mc.skip_threshold = m_threshold;
            mc.emit_pairs = m_pairs;
            mc.track_xlcp = m_pairs;
            bwtk::MergeResult res = bwtk::run_merge(parts, alpha, mc);
            printf("n=%llu\niterations=%u\nmaxlcp=%llu\n", (unsigned long long)res.n,
                   res.iterations, (unsigned long long)res.maxlcp);
        } else if (*lcpm) {
            bwtk::validate_pair_files(lm_pairs, lm_n);
            bwtk::LcpMergeResult res =
                bwtk::merge_pair_files(lm_pairs, lm_n, lm_out, lm_fan_in, !lm_no_xlcp);
            printf("maxlcp=%llu\navelcp=%.6f\n", (unsigned long long)res.maxlcp, res.avelcp);
        } else if (*rep1 || *rep2) {
            auto type = *rep1 ? bwtk::RepeatType::Type1 : bwtk::RepeatType::Type2;
            uint64_t count = bwtk::find_repeats_files(r_prefix, r_out, rprm, type);
            if (r_text) {
                bwtk::ByteReader in(r_out);
                std::string text_path = r_out + ".tsv";
                FILE* f = fopen(text_path.c_str(), "w");
                if (!f) throw bwtk::IoError("cannot open " + text_path);
                for (uint64_t i = 0; i < count; ++i) {
                    uint8_t rec[24];
                    in.read_exact(rec, 24);
                    fprintf(f, "%u\t%llu\t%llu\t%u\n", bwtk::get_u32(rec),
                            (unsigned long long)bwtk::get_u64(rec + 4),
                            (unsigned long long)bwtk::get_u64(rec + 12),
                            bwtk::get_u32(rec + 20));
                }
                fclose(f);
            }
            printf("repeats=%llu\n", (unsigned long long)count);
        } else if (*ovl) {
            bwtk::OverlapStats st = bwtk::find_overlaps_files(o_prefix, o_out, oprm);
            if (o_text) {
                bwtk::ByteReader in(o_out);
                std::string text_path = o_out + ".tsv";
                FILE* f = fopen(text_path.c_str(), "w");
                if (!f) throw bwtk::IoError("cannot open " + text_path);
                for (uint64_t i = 0; i < st.reported; ++i) {
                    uint8_t rec[12];
                    in.read_exact(rec, 12);
                    fprintf(f, "%u\t%u\t%u\n", bwtk::get_u32(rec), bwtk::get_u32(rec + 4),
                            bwtk::get_u32(rec + 8));
                }
                fclose(f);
            }
            printf("overlaps=%llu\npushes=%llu\nevictions=%llu\n",
                   (unsigned long long)st.reported, (unsigned long long)st.pushes,
                   (unsigned long long)st.evictions);
        } else if (*dbg) {
            if (d_out.empty()) d_out = d_prefix;
            bwtk::BossFiles out = bwtk::write_boss_files(d_prefix, d_out, d_k, d_colors);
            printf("nodes=%llu\nedges=%llu\n", (unsigned long long)out.nodes,
                   (unsigned long long)out.edges);
        } else if (*verify) {
            bwtk::Collection coll = bwtk::load_collection(v_input, parse_format(v_format));
            bwtk::verify_outputs(coll, v_prefix, !v_no_lcp, !v_no_xlcp);
            printf("ok\n");
        }
    } catch (const bwtk::VerifyError& e) {
        fprintf(stderr, "verification failed: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
