#include "metchange/commands.hpp"

#include "metchange/annotation.hpp"
#include "metchange/change.hpp"
#include "metchange/corpus.hpp"
#include "metchange/error.hpp"
#include "metchange/eval.hpp"
#include "metchange/matrix.hpp"
#include "metchange/measures.hpp"
#include "metchange/normalize.hpp"
#include "metchange/rng.hpp"
#include "metchange/text.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include <fmt/format.h>

namespace fs = std::filesystem;

namespace metchange {

namespace {

std::string require_path(const Config& config, const std::string& key) {
    const auto& path = config.get(key);
    if (path.empty()) throw ConfigError("config key '" + key + "' must name an input file");
    if (!fs::is_regular_file(path)) throw ConfigError(key + ": no such file: " + path);
    return path;
}

std::ofstream open_output(const fs::path& path) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

fs::path output_dir(const Config& config) { return fs::path(config.get("output_dir")); }

fs::path matrix_prefix(const Config& config, const std::string& label) {
    return output_dir(config) / "matrices" / label;
}

WindowOptions window_options(const Config& config) {
    WindowOptions w;
    w.window = config.get_uint("window");
    if (w.window < 1) throw ConfigError("window must be at least 1");
    w.scope = parse_window_scope(config.get("window_scope"));
    return w;
}

PreprocessOptions preprocess_options(const Config& config) {
    PreprocessOptions p;
    p.min_corpus_freq = config.get_uint("min_corpus_freq");
    for (const auto& tag : config.get_list("punctuation_tags")) p.punctuation_tags.insert(tag);
    return p;
}

std::vector<TargetSpec> load_targets(const Config& config) {
    PeriodRule rule;
    rule.corpus_end = static_cast<int>(config.get_int("corpus_end"));
    return read_test_set_file(require_path(config, "test_set"), rule);
}

std::vector<YearRange> target_periods(const std::vector<TargetSpec>& targets) {
    std::set<YearRange> ranges;
    for (const auto& t : targets) {
        ranges.insert(t.period1);
        ranges.insert(t.period2);
    }
    return {ranges.begin(), ranges.end()};
}

std::vector<YearRange> configured_slices(const Config& config) {
    if (config.get("slices") == "auto") return target_periods(load_targets(config));
    std::vector<YearRange> out;
    for (const auto& label : config.get_list("slices")) out.push_back(parse_year_range(label));
    return out;
}

std::vector<Measure> configured_measures(const Config& config) {
    std::vector<Measure> out;
    for (const auto& m : config.get_list("measures")) out.push_back(parse_measure(m));
    return out;
}

std::size_t thread_count(const Config& config) { return std::max<std::size_t>(1, config.get_uint("threads")); }

std::vector<std::string> resolve_subsets(const Config& config, const std::vector<TargetSpec>& targets) {
    if (config.get("subsets") != "auto") return config.get_list("subsets");
    SubsetBy by = parse_subset_by(config.get("subset_by"));
    std::set<std::string> labels;
    for (const auto& t : targets) labels.insert(subset_label(t, by));
    std::vector<std::string> out{"all"};
    out.insert(out.end(), labels.begin(), labels.end());
    return out;
}

} // namespace

void run_build(const Config& config, std::ostream& log) {
    const std::string corpus_path = require_path(config, "corpus");
    const auto ranges = configured_slices(config);
    const auto window = window_options(config);
    if (ranges.empty()) throw ConfigError("no slices to build");

    Corpus corpus = preprocess(read_corpus_file(corpus_path), preprocess_options(config));
    log << "preprocessed corpus: " << corpus.size() << " documents, " << count_tokens(corpus) << " tokens\n";

    auto summary = open_output(output_dir(config) / "slices.tsv");
    summary << config.header() << "slice\tN\tvocabulary\ttotal_pairs\n";
    log << fmt::format("{:<12}{:>12}{:>12}{:>14}\n", "slice", "N", "vocabulary", "total_pairs");
    for (const auto& range : ranges) {
        TimeSlice ts = slice(corpus, range);
        if (ts.empty()) log << "warning: slice " << ts.label << " is empty\n";
        CoocMatrix m = build_matrix(ts, window, thread_count(config));
        m.check_invariants();
        fs::create_directories(output_dir(config) / "matrices");
        write_matrix(m, matrix_prefix(config, ts.label).string());
        summary << ts.label << '\t' << m.token_count() << '\t' << m.vocabulary_size() << '\t' << m.total_pairs()
                << '\n';
        log << fmt::format("{:<12}{:>12}{:>12}{:>14}\n", ts.label, m.token_count(), m.vocabulary_size(),
                           m.total_pairs());
    }
}

void run_score(const Config& config_in, std::ostream& log) {
    Config config = config_in;
    const auto measures = configured_measures(config);
    if (measures.empty()) {
        log << "warning: no measures requested, nothing to score\n";
        return;
    }
    const auto targets = load_targets(config);
    const bool need_mon = std::find(measures.begin(), measures.end(), Measure::H_MON) != measures.end();
    if (need_mon) require_path(config, "corpus");

    std::map<YearRange, CoocMatrix> matrices;
    for (const auto& range : target_periods(targets)) {
        auto prefix = matrix_prefix(config, range.label());
        if (!fs::is_regular_file(prefix.string() + ".meta"))
            throw Error("no matrix for slice " + range.label() + " (expected " + prefix.string() +
                        ".tsv/.meta); run `build` with this slice");
        matrices.emplace(range, read_matrix(prefix.string()));
    }

    const auto window = window_options(config);
    for (const auto& [range, m] : matrices)
        if (m.window() != window.window || m.scope() != window.scope)
            throw ConfigError("matrix " + range.label() + " was built with a different window");

    std::map<YearRange, TimeSlice> slices;
    if (need_mon) {
        Corpus corpus = preprocess(read_corpus_file(config.get("corpus")), preprocess_options(config));
        for (const auto& [range, _] : matrices) slices.emplace(range, slice(corpus, range));
    }

    ScoringConfig cfg;
    cfg.window = window;
    cfg.h2.top_n = config.get_uint("h2.top_n");
    cfg.h2.aggregate = parse_aggregate(config.get("h2.aggregate"));
    cfg.h2.metric = parse_association(config.get("h2.metric"));
    const auto& cap = config.get("h2.cap");
    if (cap != "symmetric" && cap != "asymmetric") throw ConfigError("h2.cap must be symmetric or asymmetric");
    cfg.h2_symmetric_cap = cap == "symmetric";
    cfg.ols_window_n = config.get_uint("ols.window_n");
    cfg.mon.k_samples = config.get_uint("mon.k");
    cfg.mon.seed = derive_seed(config.get_uint("seed"), "mon");
    cfg.mon.threads = thread_count(config);
    if (need_mon) {
        if (config.get("mon.n") == "auto") {
            std::vector<OccurrenceCount> counts;
            for (const auto& t : targets)
                counts.push_back({t.key(), matrices.at(t.period1).token_freq(t.key()),
                                  matrices.at(t.period2).token_freq(t.key())});
            auto choice = mon_choose_n(counts);
            for (const auto& missing : choice.insufficient)
                log << "warning: " << missing << " is absent from one of its periods; ignored for mon.n\n";
            log << "mon.n resolved to " << choice.n << "\n";
            config.set("mon.n", std::to_string(choice.n));
        }
        cfg.mon.n_contexts = config.get_uint("mon.n");
    }

    std::map<YearRange, std::vector<FrequencyPoint>> ols_points;
    auto lookup = [&](const YearRange& r) {
        PeriodData p;
        p.matrix = &matrices.at(r);
        if (auto it = slices.find(r); it != slices.end()) p.slice = &it->second;
        if (auto it = ols_points.find(r); it != ols_points.end()) p.ols_points = &it->second;
        return p;
    };
    if (std::find(measures.begin(), measures.end(), Measure::H_OLS) != measures.end())
        for (const auto& [range, m] : matrices) ols_points.emplace(range, frequency_points(m));

    const fs::path out_dir = output_dir(config);
    auto report = open_output(out_dir / "change_report.tsv");
    auto exclusions = open_output(out_dir / "exclusions.tsv");
    auto values = open_output(out_dir / "measures.tsv");
    report << config.header();
    write_change_header(report);
    exclusions << config.header();
    values << config.header() << "target\tslice\tmeasure\tvalue\n";

    std::vector<Exclusion> all_excluded;
    for (Measure measure : measures) {
        auto outcome = score_targets(targets, lookup, measure, cfg);
        auto ranked = rank_targets(outcome.scores);
        write_change_rows(report, ranked);
        std::vector<MeasureValue> dump;
        for (const auto& s : ranked) {
            dump.push_back({s.target.key(), s.target.period1.label(), measure, s.value_p1});
            dump.push_back({s.target.key(), s.target.period2.label(), measure, s.value_p2});
        }
        write_measure_values(values, dump);
        log << to_string(measure) << ": " << ranked.size() << " scored, " << outcome.excluded.size() << " excluded\n";
        all_excluded.insert(all_excluded.end(), outcome.excluded.begin(), outcome.excluded.end());

        if (measure == Measure::H_OLS) {
            auto fits = open_output(out_dir / "ols_fits.tsv");
            fits << config.header();
            write_ols_header(fits);
            for (const auto& t : targets)
                for (const auto& r : {t.period1, t.period2}) {
                    try {
                        write_ols_row(fits, t.key(), r.label(), ols_delta(ols_points.at(r), t.key(), cfg.ols_window_n));
                    } catch (const UndefinedMeasure&) {
                    } catch (const DegenerateFit&) {
                    }
                }
        }
    }
    write_exclusions(exclusions, all_excluded);
}

void run_eval(const Config& config, std::ostream& log) {
    const auto targets = load_targets(config);
    const auto gold = read_gold_file(require_path(config, "gold"));
    std::string predictions_path = config.get("predictions");
    if (predictions_path.empty()) predictions_path = (output_dir(config) / "change_report.tsv").string();
    if (!fs::is_regular_file(predictions_path)) throw ConfigError("predictions: no such file: " + predictions_path);

    std::map<std::string, const TargetSpec*> by_key;
    for (const auto& t : targets) by_key[t.key()] = &t;

    std::ifstream in(predictions_path);
    std::vector<ChangeScore> scores;
    std::vector<std::string> unknown;
    for (const auto& row : read_change_report(in)) {
        auto it = by_key.find(row.lexeme);
        if (it == by_key.end()) {
            unknown.push_back(row.lexeme);
            continue;
        }
        ChangeScore s;
        s.target = *it->second;
        s.measure = row.measure;
        s.value_p1 = row.v1;
        s.value_p2 = row.v2;
        s.d = row.d;
        s.rank = row.rank;
        scores.push_back(std::move(s));
    }
    if (!unknown.empty()) throw KeyMismatch("predicted targets missing from the test set: " + text::join(unknown, ", "));

    EvalOptions options;
    options.subsets = resolve_subsets(config, targets);
    options.subset_by = parse_subset_by(config.get("subset_by"));
    options.resamples = config.get_uint("spearman.resamples");
    options.seed = derive_seed(config.get_uint("seed"), "spearman");
    options.threads = thread_count(config);
    auto cells = evaluate(scores, gold, options);

    const fs::path out_dir = output_dir(config);
    auto tsv = open_output(out_dir / "eval_report.tsv");
    tsv << config.header();
    write_eval_tsv(tsv, cells);
    auto txt = open_output(out_dir / "eval_report.txt");
    txt << config.header() << '\n';
    write_eval_text(txt, cells, options.subsets);
    write_eval_text(log, cells, options.subsets);
}

void run_annotate(const Config& config, std::ostream& log) {
    const std::string corpus_path = require_path(config, "corpus");
    const auto targets = load_targets(config);
    Corpus corpus = read_corpus_file(corpus_path);

    std::map<YearRange, TimeSlice> slices;
    for (const auto& r : target_periods(targets)) slices.emplace(r, slice(corpus, r));

    std::vector<AnnotationTarget> requests;
    for (const auto& t : targets) requests.push_back({t.key(), &slices.at(t.period1), &slices.at(t.period2)});

    SamplingOptions options;
    options.per_period = config.get_uint("annotation.per_period");
    options.min_len = config.get_uint("annotation.min_len");
    options.punctuation = preprocess_options(config);
    auto pairs = sample_annotation_set(requests, options, derive_seed(config.get_uint("seed"), "annotate"));

    auto out = open_output(output_dir(config) / "annotation.tsv");
    out << config.header();
    write_annotation_sheet(out, pairs);
    log << pairs.size() << " context pairs for " << targets.size() << " targets\n";
}

void run_agreement(const Config& config, std::ostream& log) {
    const auto targets = load_targets(config);
    std::ifstream items_in(require_path(config, "items"));
    const auto orders = read_display_orders(items_in);
    std::ifstream judgments_in(require_path(config, "judgments"));
    const auto judgments = read_judgments(judgments_in);
    const auto annotators = config.get_list("annotators");

    auto stats = tally_judgments(judgments, orders, annotators);
    std::map<std::string, const TargetSpec*> by_key;
    for (const auto& t : targets) by_key[t.key()] = &t;
    std::vector<std::string> unknown;
    for (const auto& [key, _] : stats)
        if (!by_key.count(key)) unknown.push_back(key);
    if (!unknown.empty()) throw KeyMismatch("judged targets missing from the test set: " + text::join(unknown, ", "));

    struct Row {
        const TargetSpec* target;
        PeriodStats stats;
        std::optional<double> delta;
    };
    std::vector<Row> rows;
    for (const auto& t : targets) {
        auto it = stats.find(t.key());
        if (it == stats.end()) continue;
        Row r{&t, it->second, std::nullopt};
        if (r.stats.earlier.pct_plus && r.stats.later.pct_plus)
            r.delta = *r.stats.later.pct_plus - *r.stats.earlier.pct_plus;
        rows.push_back(r);
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.delta.has_value() != b.delta.has_value()) return a.delta.has_value();
        return a.delta && *a.delta > *b.delta;
    });

    auto opt6 = [](const std::optional<double>& v) { return v ? text::fixed(*v) : std::string("-"); };
    auto opt2 = [](const std::optional<double>& v) { return v ? text::short_decimal(*v) : std::string("-"); };

    auto tsv = open_output(output_dir(config) / "agreement.tsv");
    tsv << config.header();
    write_gold_header(tsv);
    for (const auto& r : rows) {
        tsv << r.target->lemma << '\t' << to_string(r.target->type) << '\t' << r.target->period1.label() << '\t'
            << opt6(r.stats.earlier.pct_plus) << '\t' << text::fixed(r.stats.earlier.pct_agree) << '\t'
            << opt6(r.stats.earlier.kappa) << '\t' << r.target->period2.label() << '\t'
            << opt6(r.stats.later.pct_plus) << '\t' << text::fixed(r.stats.later.pct_agree) << '\t'
            << opt6(r.stats.later.kappa) << '\t' << opt6(r.delta) << '\n';
    }

    auto txt = open_output(output_dir(config) / "agreement.txt");
    txt << config.header() << '\n';
    auto line = [&](const std::string& lexeme, const std::string& type, const std::string& t1,
                    const AnnotationStats& e, const std::string& t2, const AnnotationStats& l,
                    const std::optional<double>& delta) {
        txt << fmt::format("{:<18}{:<6}{:<11}{:>6}{:>6}{:>6}  {:<11}{:>6}{:>6}{:>6}{:>8}\n", lexeme, type, t1,
                           opt2(e.pct_plus), text::short_decimal(e.pct_agree), opt2(e.kappa), t2, opt2(l.pct_plus),
                           text::short_decimal(l.pct_agree), opt2(l.kappa), opt2(delta));
    };
    txt << fmt::format("{:<18}{:<6}{:<11}{:>6}{:>6}{:>6}  {:<11}{:>6}{:>6}{:>6}{:>8}\n", "lexeme", "type", "time",
                       "%+", "%A", "kappa", "time", "%+", "%A", "kappa", "d%+");
    for (const auto& r : rows)
        line(r.target->lemma, std::string(to_string(r.target->type)), r.target->period1.label(), r.stats.earlier,
             r.target->period2.label(), r.stats.later, r.delta);
    if (!rows.empty()) {
        auto pooled = pooled_stats(judgments, orders, annotators);
        std::optional<double> delta;
        if (pooled.earlier.pct_plus && pooled.later.pct_plus) delta = *pooled.later.pct_plus - *pooled.earlier.pct_plus;
        line("all", "-", "-", pooled.earlier, "-", pooled.later, delta);
    }
    log << rows.size() << " targets tallied from " << judgments.size() << " judgments\n";
}

} // namespace metchange
