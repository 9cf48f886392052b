#include "fpkit/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <regex>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "fpkit/biostats.hpp"
#include "fpkit/errors.hpp"
#include "fpkit/fpmetrics.hpp"
#include "fpkit/parallel.hpp"
#include "fpkit/synth.hpp"

namespace fs = std::filesystem;

namespace fpkit {

namespace {

std::string fmt_real(double v, int prec) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
    return buf;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw ValidationError("cannot create output directory: " + dir);
}

void check_id_is_filename_safe(const std::string& id) {
    if (id.find('/') != std::string::npos || id.find('\\') != std::string::npos ||
        id.find("..") != std::string::npos)
        throw ValidationError("print id not usable as a file name: '" + id + "'");
}

std::string hist_csv(const EmpiricalDist& d, int64_t bin) {
    std::ostringstream out;
    out << "bin_start,count\n";
    for (const auto& b : histogram(d, bin)) out << b.lo << ',' << b.count << '\n';
    return out.str();
}

std::string cdf_csv(const EmpiricalDist& d) {
    std::ostringstream out;
    out << "x,F\n";
    for (const auto& p : cdf_points(d)) out << p.x << ',' << fmt_real(p.f, 6) << '\n';
    return out.str();
}

double median_of(const EmpiricalDist& d) {
    const auto& s = d.scores;
    size_t n = s.size();
    if (n == 0) return 0.0;
    return n % 2 ? static_cast<double>(s[n / 2])
                 : 0.5 * (s[n / 2 - 1] + s[n / 2]);
}

// Extracts the given manifest entries in parallel, in manifest order.
std::vector<MinutiaeTemplate> extract_entries(const Manifest& m,
                                              const std::vector<size_t>& which,
                                              const ExtractParams& params,
                                              int threads) {
    std::vector<MinutiaeTemplate> out(which.size());
    parallel_for(which.size(), threads, [&](size_t b, size_t e) {
        for (size_t k = b; k < e; ++k) {
            const auto& entry = m.entries[which[k]];
            GrayImage img = load_image(m.resolve_path(entry));
            out[k] = extract_minutiae(img, params);
            out[k].source_id = entry.print_id;
        }
    });
    return out;
}

std::vector<size_t> all_indices(const Manifest& m) {
    std::vector<size_t> v(m.entries.size());
    for (size_t i = 0; i < v.size(); ++i) v[i] = i;
    return v;
}

}  // namespace

Manifest cmd_synth(const SynthArgs& a) {
    if (a.count < 1) throw ValidationError("count must be >= 1");
    if (a.mates < 1) throw ValidationError("mates must be >= 1");

    std::optional<FingerClass> cls;
    if (!a.finger_class.empty()) {
        if (a.finger_class == "arch") cls = FingerClass::arch;
        else if (a.finger_class == "left_loop") cls = FingerClass::left_loop;
        else if (a.finger_class == "right_loop") cls = FingerClass::right_loop;
        else if (a.finger_class == "whorl") cls = FingerClass::whorl;
        else throw ValidationError("unknown finger class: '" + a.finger_class + "'");
    }

    ensure_dir(a.out_dir);
    Manifest m;
    m.base_dir = a.out_dir;
    for (int i = 0; i < a.count; ++i) {
        std::string ms = "s" + std::to_string(a.seed + static_cast<uint64_t>(i));
        for (int k = 0; k < a.mates; ++k)
            m.entries.push_back({ms + "_i" + std::to_string(k), ms,
                                 ms + "_i" + std::to_string(k) + ".png"});
    }

    // One task per master so the grown ridge image is rendered mates times.
    parallel_for(static_cast<size_t>(a.count), a.threads, [&](size_t b, size_t e) {
        for (size_t i = b; i < e; ++i) {
            SynthParams params;
            params.seed = a.seed + i;
            params.finger_class = cls;
            params.width = a.width;
            params.height = a.height;
            params.crease_count = a.crease_count;
            MasterPrint master = generate_master(params);
            for (int k = 0; k < a.mates; ++k) {
                GrayImage img =
                    k == 0 ? generate(master, params)
                           : generate_mate(master, params,
                                           Rng::derive_seed(params.seed,
                                                            1000 + static_cast<uint64_t>(k)));
                const auto& entry = m.entries[i * static_cast<size_t>(a.mates) + k];
                save_image(img, (fs::path(a.out_dir) / entry.image_path).string());
            }
        }
    });

    save_manifest(m, (fs::path(a.out_dir) / "manifest.tsv").string());
    std::cout << "synth: wrote " << m.entries.size() << " prints ("
              << a.count << " identities) to " << a.out_dir << "\n";
    return m;
}

Manifest cmd_ingest(const IngestArgs& a) {
    if (!fs::is_directory(a.image_dir))
        throw ValidationError("not a directory: " + a.image_dir);

    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(a.image_dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (ext == ".png" || ext == ".pgm") files.push_back(entry.path().filename().string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw ValidationError("no images found in " + a.image_dir);

    Manifest m;
    fs::path out_path(a.out_manifest);
    fs::path out_parent = out_path.parent_path();
    if (!out_parent.empty()) ensure_dir(out_parent.string());
    m.base_dir = out_parent.string();

    std::unordered_set<std::string> seen;
    auto add = [&](const std::string& file, const std::string& identity) {
        std::string id = fs::path(file).stem().string();
        if (!seen.insert(id).second)
            throw ValidationError("duplicate print id from file names: '" + id + "'");
        fs::path img = fs::path(a.image_dir) / file;
        std::error_code ec;
        fs::path rel = fs::relative(img, out_parent.empty() ? fs::path(".") : out_parent, ec);
        m.entries.push_back({id, identity, ec ? fs::absolute(img).string() : rel.string()});
    };

    if (a.rule == "perFile") {
        for (const auto& f : files) add(f, fs::path(f).stem().string());
    } else if (a.rule == "fromFilename") {
        std::regex re;
        try {
            re = std::regex(a.pattern);
        } catch (const std::regex_error& e) {
            throw ValidationError(std::string("bad identity pattern: ") + e.what());
        }
        if (re.mark_count() < 1)
            throw ValidationError("identity pattern needs a capture group");
        bool any = false;
        for (const auto& f : files) {
            std::smatch match;
            if (std::regex_search(f, match, re) && match[1].matched) {
                add(f, match[1].str());
                any = true;
            }
        }
        if (!any) throw ValidationError("identity pattern matched no file names");
    } else {
        throw ValidationError("unknown identity rule: '" + a.rule +
                              "' (use perFile or fromFilename)");
    }

    save_manifest(m, a.out_manifest);
    std::unordered_set<std::string> ids;
    for (const auto& e : m.entries) ids.insert(e.identity_id);
    std::cout << "ingest: " << m.entries.size() << " prints, " << ids.size()
              << " identities -> " << a.out_manifest << "\n";
    return m;
}

void cmd_extract(const ExtractArgs& a) {
    Manifest m = load_manifest(a.manifest);
    if (m.entries.empty()) throw ValidationError("manifest is empty");
    for (const auto& e : m.entries) check_id_is_filename_safe(e.print_id);
    ensure_dir(a.out_dir);

    parallel_for(m.entries.size(), a.threads, [&](size_t b, size_t e) {
        for (size_t i = b; i < e; ++i) {
            const auto& entry = m.entries[i];
            GrayImage img = load_image(m.resolve_path(entry));
            MinutiaeTemplate t = extract_minutiae(img, a.params);
            t.source_id = entry.print_id;
            save_template(t, (fs::path(a.out_dir) / (entry.print_id + ".fpt")).string());
        }
    });
    std::cout << "extract: " << m.entries.size() << " templates -> " << a.out_dir
              << "\n";
}

void cmd_match(const MatchArgs& a) {
    std::ifstream in(a.pairs_file);
    if (!in) throw ValidationError("cannot open pairs file: " + a.pairs_file);
    PairList pairs;
    std::vector<std::string> order;
    std::unordered_set<std::string> known;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string probe, gallery, extra;
        if (!std::getline(ls, probe, '\t') || !std::getline(ls, gallery, '\t') ||
            std::getline(ls, extra, '\t') || probe.empty() || gallery.empty())
            throw ValidationError("pairs line " + std::to_string(lineno) +
                                  ": expected probe<TAB>gallery");
        for (const auto& id : {probe, gallery})
            if (known.insert(id).second) order.push_back(id);
        pairs.push_back({probe, gallery});
    }
    if (pairs.empty()) throw ValidationError("pairs file is empty");

    TemplateStore store;
    for (const auto& id : order) {
        check_id_is_filename_safe(id);
        fs::path p = fs::path(a.template_dir) / (id + ".fpt");
        if (!fs::exists(p))
            throw ValidationError("missing template file: " + p.string());
        store.add(load_template(p.string()), a.params);
    }

    ScoreSet scores = match_batch(store, pairs, a.params, a.threads);
    write_score_set(scores, a.out_scores);

    std::ostringstream csv;
    csv << "probe_id,gallery_id,score\n";
    for (const auto& r : scores.records)
        csv << scores.ids[r.probe] << ',' << scores.ids[r.gallery] << ','
            << r.score << '\n';
    write_text(a.out_scores + ".csv", csv.str());
    std::cout << "match: scored " << pairs.size() << " pairs -> " << a.out_scores
              << "\n";
}

void cmd_eval_uniqueness(const EvalArgs& a) {
    const RunConfig& cfg = a.cfg;
    cfg.validate();
    Manifest bona = load_manifest(a.bona_manifest);
    Manifest syn = load_manifest(a.syn_manifest);
    if (bona.entries.empty() || syn.entries.empty())
        throw ValidationError("empty manifest");
    ensure_dir(a.out_dir);

    // One template store for both sets. A print id may appear in both
    // manifests only when it names the same image file.
    std::unordered_map<std::string, std::string> path_of;
    for (const auto& e : bona.entries) path_of[e.print_id] = bona.resolve_path(e);
    std::vector<size_t> syn_new;
    for (size_t i = 0; i < syn.entries.size(); ++i) {
        const auto& e = syn.entries[i];
        auto it = path_of.find(e.print_id);
        if (it == path_of.end()) syn_new.push_back(i);
        else if (fs::weakly_canonical(it->second) !=
                 fs::weakly_canonical(syn.resolve_path(e)))
            throw ValidationError("print id '" + e.print_id +
                                  "' appears in both manifests with different images");
    }

    auto bona_templates = extract_entries(bona, all_indices(bona), cfg.extract, cfg.threads);
    auto syn_templates = extract_entries(syn, syn_new, cfg.extract, cfg.threads);
    TemplateStore store;
    for (auto& t : bona_templates) store.add(t, cfg.matcher);
    for (auto& t : syn_templates) store.add(t, cfg.matcher);

    // (a) and (c) share a sampling stream so identical manifests give
    // identical draws; (b) caps the full cross product unless full_cross.
    PairList pa = sample_imposter_pairs(bona, cfg.eval_per_print,
                                        Rng::derive_seed(cfg.seed, 21));
    PairList pc = sample_imposter_pairs(syn, cfg.eval_per_print,
                                        Rng::derive_seed(cfg.seed, 21));
    PairList pb;
    const uint64_t ns = syn.entries.size(), nb = bona.entries.size();
    const uint64_t total = ns * nb;
    if (cfg.eval_full_cross || total <= cfg.eval_cross_cap) {
        pb.reserve(total);
        for (uint64_t i = 0; i < ns; ++i)
            for (uint64_t j = 0; j < nb; ++j)
                pb.push_back({syn.entries[i].print_id, bona.entries[j].print_id});
    } else {
        Rng rng = Rng::derive(cfg.seed, 22);
        std::unordered_set<uint64_t> picked;
        picked.reserve(cfg.eval_cross_cap * 2);
        while (picked.size() < cfg.eval_cross_cap)
            picked.insert(rng.below(total));
        std::vector<uint64_t> idx(picked.begin(), picked.end());
        std::sort(idx.begin(), idx.end());
        pb.reserve(idx.size());
        for (uint64_t v : idx)
            pb.push_back({syn.entries[v / nb].print_id,
                          bona.entries[v % nb].print_id});
    }

    ScoreSet sa = match_batch(store, pa, cfg.matcher, cfg.threads);
    ScoreSet sb = match_batch(store, pb, cfg.matcher, cfg.threads);
    ScoreSet sc = match_batch(store, pc, cfg.matcher, cfg.threads);
    write_score_set(sa, (fs::path(a.out_dir) / "scores_bona_imposter.bin").string());
    write_score_set(sb, (fs::path(a.out_dir) / "scores_cross.bin").string());
    write_score_set(sc, (fs::path(a.out_dir) / "scores_syn_imposter.bin").string());

    EmpiricalDist da = EmpiricalDist::from_values(scores_of(sa));
    EmpiricalDist db = EmpiricalDist::from_values(scores_of(sb));
    EmpiricalDist dc = EmpiricalDist::from_values(scores_of(sc));

    ThresholdResult thr = select_threshold(da, cfg.eval_target_far);
    bool far_warn = static_cast<double>(da.n()) * cfg.eval_target_far < 1.0;
    size_t fm_cross = db.count_at_or_above(thr.threshold);
    size_t fm_syn = dc.count_at_or_above(thr.threshold);
    KsResult ks = ks_less(db, da);

    struct Panel {
        const char* name;
        const EmpiricalDist* d;
    };
    for (const Panel& p : {Panel{"bona_imposter", &da}, Panel{"cross", &db},
                           Panel{"syn_imposter", &dc}}) {
        write_text((fs::path(a.out_dir) / ("hist_" + std::string(p.name) + ".csv")).string(),
                   hist_csv(*p.d, cfg.eval_hist_bin));
        write_text((fs::path(a.out_dir) / ("cdf_" + std::string(p.name) + ".csv")).string(),
                   cdf_csv(*p.d));
    }

    std::ostringstream md;
    md << "# Imposter-score uniqueness report\n\n";
    md << "Bonafide set: " << nb << " prints; synthetic set: " << ns << " prints.\n\n";
    md << "| distribution | pairs | median | max |\n";
    md << "|---|---|---|---|\n";
    auto dist_row = [&](const char* name, const EmpiricalDist& d) {
        md << "| " << name << " | " << d.n() << " | " << fmt_real(median_of(d), 1)
           << " | " << d.scores.back() << " |\n";
    };
    dist_row("bonafide self-imposter (a)", da);
    dist_row("synthetic vs bonafide (b)", db);
    dist_row("synthetic self-imposter (c)", dc);
    md << "\n## Threshold\n\n";
    md << "Target FAR " << fmt_real(cfg.eval_target_far, 6) << " on (a): threshold "
       << thr.threshold << ", achieved FAR " << fmt_real(thr.achieved_far, 6)
       << ".\n";
    if (far_warn)
        md << "\n**Warning: FAR below resolution** - the imposter sample has "
           << da.n() << " scores, so the smallest nonzero FAR is "
           << fmt_real(1.0 / static_cast<double>(da.n()), 6)
           << ", above the target.\n";
    md << "\n## False matches at threshold " << thr.threshold << "\n\n";
    md << "- synthetic vs bonafide (b): " << fm_cross << " of " << db.n() << " ("
       << fmt_real(far_at_threshold(db, thr.threshold), 6) << ")\n";
    md << "- synthetic self (c): " << fm_syn << " of " << dc.n() << " ("
       << fmt_real(far_at_threshold(dc, thr.threshold), 6) << ")\n";
    md << "\n## Directed KS test: (b) below (a)?\n\n";
    md << "D = " << fmt_real(ks.d, 6) << ", p = " << fmt_real(ks.p, 6) << " (n = "
       << ks.n << ", m = " << ks.m << ").\n";
    md << (ks.p < 0.01
               ? "Cross-comparison scores sit significantly below the bonafide "
                 "imposter baseline.\n"
               : "No significant downward shift of cross-comparison scores "
                 "relative to the bonafide imposter baseline.\n");
    md << "\nScore sets: scores_bona_imposter.bin, scores_cross.bin, "
          "scores_syn_imposter.bin (with .ids sidecars); histograms and CDFs "
          "as hist_*.csv / cdf_*.csv.\n";
    write_text((fs::path(a.out_dir) / "report.md").string(), md.str());

    if (far_warn) std::cout << "warning: FAR below resolution (" << da.n()
                            << " imposter scores for target "
                            << fmt_real(cfg.eval_target_far, 6) << ")\n";
    std::cout << "eval-uniqueness: threshold " << thr.threshold << " (achieved FAR "
              << fmt_real(thr.achieved_far, 6) << "), cross false matches "
              << fm_cross << "/" << db.n() << ", KS D " << fmt_real(ks.d, 4)
              << " p " << fmt_real(ks.p, 4) << " -> " << a.out_dir << "\n";
}

namespace {

std::unordered_map<std::string, int> load_nfiq2_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open nfiq2 file: " + path);
    std::unordered_map<std::string, int> map;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw ValidationError("nfiq2 line " + std::to_string(lineno) +
                                  ": expected print_id,score");
        std::string id = line.substr(0, comma);
        std::string val = line.substr(comma + 1);
        int score = 0;
        try {
            size_t used = 0;
            score = std::stoi(val, &used);
            if (used != val.size()) throw std::invalid_argument(val);
        } catch (const std::exception&) {
            if (lineno == 1) continue;  // header
            throw ValidationError("nfiq2 line " + std::to_string(lineno) +
                                  ": bad score '" + val + "'");
        }
        if (score < 0 || score > 100)
            throw ValidationError("nfiq2 line " + std::to_string(lineno) +
                                  ": score out of range [0,100]");
        if (!map.emplace(id, score).second)
            throw ValidationError("nfiq2 line " + std::to_string(lineno) +
                                  ": duplicate print id '" + id + "'");
    }
    return map;
}

struct PerPrintRow {
    std::string print_id;
    std::string identity_id;
    MinutiaCounts counts;
    ReliabilityStats rel;
    PrintMetrics pm;
};

struct SummaryCell {
    std::string label;
    std::optional<MetricSummary> s;
    double coverage = 1.0;
};

std::optional<MetricSummary> maybe_summarize(const std::vector<double>& v) {
    if (v.empty()) return std::nullopt;
    return summarize(v);
}

}  // namespace

void cmd_metrics(const MetricsArgs& a) {
    const RunConfig& cfg = a.cfg;
    cfg.validate();
    if (a.manifests.empty()) throw ValidationError("no manifests given");
    ensure_dir(a.out_dir);

    std::unordered_map<std::string, int> nfiq;
    bool have_nfiq = !a.nfiq2_csv.empty();
    if (have_nfiq) nfiq = load_nfiq2_csv(a.nfiq2_csv);

    std::vector<std::string> names;
    std::vector<std::vector<SummaryCell>> tables;
    std::vector<std::string> notes;
    if (!have_nfiq) notes.push_back("NFIQ2: no score file supplied; row omitted.");

    for (const auto& mpath : a.manifests) {
        std::string name = fs::path(mpath).stem().string();
        if (std::find(names.begin(), names.end(), name) != names.end())
            throw ValidationError("duplicate dataset name: '" + name +
                                  "' (rename a manifest)");
        names.push_back(name);

        Manifest m = load_manifest(mpath);
        if (m.entries.empty()) throw ValidationError("manifest is empty: " + mpath);

        std::vector<PerPrintRow> rows(m.entries.size());
        parallel_for(m.entries.size(), cfg.threads, [&](size_t b, size_t e) {
            for (size_t i = b; i < e; ++i) {
                const auto& entry = m.entries[i];
                GrayImage img = load_image(m.resolve_path(entry));
                MinutiaeTemplate t = extract_minutiae(img, cfg.extract);
                std::optional<int> score;
                auto it = nfiq.find(entry.print_id);
                if (it != nfiq.end()) score = it->second;
                rows[i] = {entry.print_id, entry.identity_id, minutia_counts(t),
                           reliability_stats(t),
                           print_metrics(img, score, cfg.metrics_patch_count)};
            }
        });

        std::ostringstream csv;
        csv << "print_id,identity_id,ending_count,bifurcation_count,"
               "ending_reliability,bifurcation_reliability,bifurcation_fraction,"
               "ridge_count,white_line_count,rtvtr,rtvtr_min_ratio,area_kpx2,"
               "nfiq2\n";
        for (const auto& r : rows) {
            csv << r.print_id << ',' << r.identity_id << ',' << r.counts.endings
                << ',' << r.counts.bifurcations << ',';
            if (r.rel.mean_ending) csv << fmt_real(*r.rel.mean_ending, 4);
            csv << ',';
            if (r.rel.mean_bifurcation) csv << fmt_real(*r.rel.mean_bifurcation, 4);
            csv << ',';
            if (r.counts.endings + r.counts.bifurcations > 0)
                csv << fmt_real(r.counts.pct_bifurcation, 4);
            csv << ',' << fmt_real(r.pm.ridge_count, 4) << ','
                << fmt_real(r.pm.white_line_count, 4) << ','
                << fmt_real(r.pm.rtvtr, 4) << ','
                << fmt_real(r.pm.rtvtr_min_ratio, 4) << ','
                << fmt_real(r.pm.area_kpx2, 4) << ',';
            if (r.pm.nfiq2) csv << *r.pm.nfiq2;
            csv << '\n';
        }
        write_text((fs::path(a.out_dir) / ("metrics_" + name + ".csv")).string(),
                   csv.str());

        const double n = static_cast<double>(rows.size());
        std::vector<double> endings, bifs, rel_end, rel_bif, frac, ridge, white,
            rtvtr, area, nf;
        for (const auto& r : rows) {
            endings.push_back(r.counts.endings);
            bifs.push_back(r.counts.bifurcations);
            if (r.rel.mean_ending) rel_end.push_back(*r.rel.mean_ending);
            if (r.rel.mean_bifurcation) rel_bif.push_back(*r.rel.mean_bifurcation);
            if (r.counts.endings + r.counts.bifurcations > 0)
                frac.push_back(r.counts.pct_bifurcation);
            ridge.push_back(r.pm.ridge_count);
            white.push_back(r.pm.white_line_count);
            rtvtr.push_back(r.pm.rtvtr);
            area.push_back(r.pm.area_kpx2);
            if (r.pm.nfiq2) nf.push_back(static_cast<double>(*r.pm.nfiq2));
        }

        std::vector<SummaryCell> table;
        auto cell = [&](const std::string& label, const std::vector<double>& v) {
            table.push_back({label, maybe_summarize(v), v.size() / n});
        };
        cell("Ridge Ending Count", endings);
        cell("Bifurcation Count", bifs);
        cell("Ending Reliability", rel_end);
        cell("Bifurcation Reliability", rel_bif);
        cell("Bifurcation Fraction", frac);
        cell("Ridge Count", ridge);
        cell("White Line Count", white);
        cell("RTVTR", rtvtr);
        cell("Area (kpx^2)", area);
        if (have_nfiq) cell("NFIQ2", nf);
        tables.push_back(std::move(table));

        if (!nf.empty()) {
            std::vector<int64_t> vals(nf.begin(), nf.end());
            write_text((fs::path(a.out_dir) / ("nfiq2_hist_" + name + ".csv")).string(),
                       hist_csv(EmpiricalDist::from_values(vals), 1));
        }

        std::cout << "metrics: " << name << ": " << rows.size()
                  << " prints, mean ridge count "
                  << fmt_real(summarize(ridge).mean, 2) << ", mean area "
                  << fmt_real(summarize(area).mean, 1) << " kpx^2\n";
    }

    // Side-by-side markdown (one stat block of columns per dataset) + flat CSV.
    std::ostringstream md, scsv;
    md << "# Fingerprint metric summary\n\n| Measure |";
    for (const auto& name : names)
        md << ' ' << name << " Mean | " << name << " STD | " << name
           << " Skew | " << name << " ExKurt |";
    md << "\n|---|";
    for (size_t i = 0; i < names.size(); ++i) md << "---|---|---|---|";
    md << '\n';
    scsv << "dataset,measure,n,coverage,mean,std,skewness,ex_kurtosis\n";

    const size_t row_count = tables.front().size();
    for (const auto& t : tables)
        if (t.size() != row_count)
            throw std::runtime_error("inconsistent summary tables");
    for (size_t r = 0; r < row_count; ++r) {
        md << "| " << tables.front()[r].label << " |";
        for (size_t d = 0; d < tables.size(); ++d) {
            const SummaryCell& c = tables[d][r];
            if (c.s) {
                md << ' ' << fmt_real(c.s->mean, 3) << " | "
                   << fmt_real(c.s->stddev, 3) << " | "
                   << (c.s->skewness ? fmt_real(*c.s->skewness, 3) : "-") << " | "
                   << (c.s->ex_kurtosis ? fmt_real(*c.s->ex_kurtosis, 3) : "-")
                   << " |";
            } else {
                md << " - | - | - | - |";
            }
            if (c.coverage < 1.0)
                notes.push_back(c.label + " (" + names[d] + "): coverage " +
                                fmt_real(100.0 * c.coverage, 1) + "%.");
            scsv << names[d] << ',' << c.label << ',' << (c.s ? c.s->n : 0) << ','
                 << fmt_real(c.coverage, 4) << ',';
            if (c.s) {
                scsv << fmt_real(c.s->mean, 6) << ',' << fmt_real(c.s->stddev, 6)
                     << ',';
                if (c.s->skewness) scsv << fmt_real(*c.s->skewness, 6);
                scsv << ',';
                if (c.s->ex_kurtosis) scsv << fmt_real(*c.s->ex_kurtosis, 6);
            } else {
                scsv << ",,";
            }
            scsv << '\n';
        }
        md << '\n';
    }
    if (!notes.empty()) {
        md << '\n';
        for (const auto& note : notes) md << "- " << note << '\n';
    }
    write_text((fs::path(a.out_dir) / "summary.md").string(), md.str());
    write_text((fs::path(a.out_dir) / "summary.csv").string(), scsv.str());
}

double cmd_fid(const std::string& features_a, const std::string& features_b) {
    FeatureStats fa = feature_stats(read_features_csv(features_a));
    FeatureStats fb = feature_stats(read_features_csv(features_b));
    double d = frechet_distance(fa.mean, fa.cov, fb.mean, fb.cov);
    std::cout << "frechet_distance " << fmt_real(d, 6) << "\n";
    return d;
}

}  // namespace fpkit
