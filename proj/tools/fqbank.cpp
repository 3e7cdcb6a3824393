// fqbank command-line driver: generate -> index/search -> rank -> eval, plus
// the exchange-file bridge for external scorers.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fqbank/confounders.hpp"
#include "fqbank/corpus.hpp"
#include "fqbank/dataset.hpp"
#include "fqbank/embeddings.hpp"
#include "fqbank/entity.hpp"
#include "fqbank/eval.hpp"
#include "fqbank/exchange.hpp"
#include "fqbank/index.hpp"
#include "fqbank/paraphrase.hpp"
#include "fqbank/phonetics.hpp"
#include "fqbank/ranking.hpp"

namespace fs = std::filesystem;
using namespace fqbank;

namespace {

/// Validation failure: reported and turned into exit status 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Output files are written beside their target and renamed into place on
/// commit(); anything not committed is removed.
class OutputSet {
public:
    std::ofstream& open(const fs::path& target) {
        const fs::path tmp = target.string() + ".partial";
        auto& entry = files_.emplace_back(Entry{target, tmp, std::make_unique<std::ofstream>(tmp, std::ios::binary)});
        if (!*entry.stream) {
            throw std::runtime_error("cannot write " + target.string());
        }
        return *entry.stream;
    }

    void commit() {
        for (auto& f : files_) {
            f.stream->close();
            if (!*f.stream) {
                throw std::runtime_error("write failed: " + f.target.string());
            }
        }
        for (auto& f : files_) {
            fs::rename(f.tmp, f.target);
        }
        files_.clear();
    }

    ~OutputSet() {
        for (auto& f : files_) {
            f.stream->close();
            std::error_code ec;
            fs::remove(f.tmp, ec);
        }
    }

private:
    struct Entry {
        fs::path target;
        fs::path tmp;
        std::unique_ptr<std::ofstream> stream;
    };
    std::vector<Entry> files_;
};

std::ifstream open_input(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UsageError("cannot open " + path.string());
    }
    return in;
}

std::vector<Sample> load_samples(const fs::path& path) {
    auto in = open_input(path);
    return read_samples(in);
}

void print_warnings(const std::vector<std::string>& warnings, std::size_t limit = 20) {
    for (std::size_t i = 0; i < warnings.size() && i < limit; ++i) {
        std::cerr << "warning: " << warnings[i] << '\n';
    }
    if (warnings.size() > limit) {
        std::cerr << "warning: " << warnings.size() - limit << " more warnings\n";
    }
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

struct GenerateOptions {
    std::string corpus;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::string catalog;
    std::string first_names;
    std::string last_names;
    std::string paraphrases;
    bool no_rule_paraphrases = false;
    std::string lexicon;
    std::string homophone_url;
    std::string homophone_cache = ".fqbank-homophones";
    std::size_t max_edit = 2;
    std::string generators;
    std::size_t random_count = 3;
    std::size_t max_swaps = 3;
    std::string duplicate_policy = "all_context_questions";
    bool target_history = false;
    bool fold_partial = false;
    std::size_t workers = 1;
};

int cmd_generate(const GenerateOptions& o) {
    if (!o.seed) {
        throw UsageError("generate requires --seed");
    }
    GeneratorConfig config;
    config.seed = *o.seed;
    config.random_question_count = o.random_count;
    config.max_entity_swaps_per_sample = o.max_swaps;
    config.target_history = o.target_history;
    auto policy = parse_duplicate_policy(o.duplicate_policy);
    if (!policy) {
        throw UsageError("unknown duplicate policy: " + o.duplicate_policy);
    }
    config.duplicate_policy = *policy;
    if (!o.generators.empty()) {
        config.enabled.clear();
        for (const auto& name : split_list(o.generators)) {
            auto g = parse_generator(name);
            if (!g) {
                throw UsageError("unknown generator: " + name);
            }
            config.enabled.insert(*g);
        }
    }
    if (config.needs_catalog() && o.catalog.empty()) {
        throw UsageError("entity generators are enabled but no --catalog was given");
    }
    if (config.is_enabled(Generator::asr_error) && o.lexicon.empty() && o.homophone_url.empty()) {
        throw UsageError("asr_error needs --lexicon or --homophone-url");
    }
    if (o.first_names.empty() != o.last_names.empty()) {
        throw UsageError("--first-names and --last-names go together");
    }

    std::vector<std::string> warnings;
    std::vector<Conversation> conversations;
    {
        auto in = open_input(o.corpus);
        auto report = parse_conversations(in);
        if (!report.errors.empty()) {
            for (const auto& e : report.errors) {
                std::cerr << o.corpus << ':' << e.line << ": " << e.message << '\n';
            }
            throw UsageError(std::to_string(report.errors.size()) + " malformed corpus line(s)");
        }
        conversations = std::move(report.conversations);
    }

    std::optional<EntityCatalog> catalog;
    if (!o.catalog.empty()) {
        catalog = EntityCatalog::load(o.catalog, &warnings);
    }
    std::optional<NameLexicon> names;
    if (!o.first_names.empty()) {
        names = NameLexicon::load(o.first_names, o.last_names);
    } else if (catalog) {
        names = NameLexicon::from_catalog(*catalog);
    }
    std::optional<FileParaphraseProvider> file_paraphrases;
    if (!o.paraphrases.empty()) {
        file_paraphrases = FileParaphraseProvider::load(o.paraphrases);
    }
    RuleParaphraseProvider rules;
    std::vector<const ParaphraseProvider*> chain;
    if (file_paraphrases) {
        chain.push_back(&*file_paraphrases);
    }
    if (!o.no_rule_paraphrases) {
        chain.push_back(&rules);
    }
    ChainedParaphraseProvider paraphrases(chain);

    std::optional<PhoneticLexicon> lexicon;
    if (!o.lexicon.empty()) {
        lexicon = PhoneticLexicon::load(o.lexicon);
    }
    std::optional<RemoteHomophoneClient> remote;
    if (!o.homophone_url.empty()) {
        remote.emplace(o.homophone_url, o.homophone_cache);
    }
    HomophoneSource homophones(lexicon ? &*lexicon : nullptr, remote ? &*remote : nullptr, o.max_edit);

    const auto pool = QuestionPool::build(conversations, catalog ? &*catalog : nullptr);
    GenerationResources resources;
    resources.catalog = catalog ? &*catalog : nullptr;
    resources.names = names ? &*names : nullptr;
    resources.paraphrases = chain.empty() ? nullptr : &paraphrases;
    resources.homophones = &homophones;
    resources.pool = &pool;

    auto result = build_dataset(conversations, resources, config, o.workers);
    warnings.insert(warnings.end(), result.warnings.begin(), result.warnings.end());

    std::vector<Sample> samples;
    samples.reserve(result.samples.size());
    for (const auto& s : result.samples) {
        samples.push_back(s.sample);
    }

    fs::create_directories(o.out_dir);
    OutputSet outputs;
    write_samples(outputs.open(fs::path(o.out_dir) / "dataset.jsonl"), samples);
    write_audit(outputs.open(fs::path(o.out_dir) / "audit.jsonl"), result.samples);
    const auto table = format_stats_table(compute_stats(samples), o.fold_partial);
    outputs.open(fs::path(o.out_dir) / "stats.txt") << table;
    outputs.commit();

    print_warnings(warnings);
    std::cout << table;
    return 0;
}

int cmd_index(const std::string& bank_path, const std::string& corpus_path, const std::string& out,
              const Bm25Params& params) {
    QuestionBank bank;
    if (!bank_path.empty()) {
        bank = QuestionBank::load(bank_path);
    } else if (!corpus_path.empty()) {
        auto in = open_input(corpus_path);
        auto report = parse_conversations(in);
        if (!report.errors.empty()) {
            throw UsageError(corpus_path + ":" + std::to_string(report.errors.front().line) + ": " +
                             report.errors.front().message);
        }
        bank = QuestionBank::from_conversations(report.conversations);
    } else {
        throw UsageError("index needs --bank or --corpus");
    }
    const auto index = InvertedIndex::build(bank, params);
    OutputSet outputs;
    index.save(outputs.open(out));
    outputs.commit();
    std::cout << "indexed " << index.doc_count() << " documents, " << index.terms().size() << " terms\n";
    return 0;
}

int cmd_search(const std::string& index_path, const std::string& query, std::size_t k) {
    auto in = open_input(index_path);
    const auto index = InvertedIndex::load(in);
    for (const auto& hit : index.search(query, k)) {
        nlohmann::ordered_json j;
        j["doc_id"] = hit.doc_id;
        j["score"] = hit.score;
        std::cout << j.dump() << '\n';
    }
    return 0;
}

struct RankOptions {
    std::string dataset;
    std::string out;
    std::string scorer = "cosine";
    std::string vectors;
    std::size_t dim = 300;
    std::string scores;
    Bm25Params bm25;
    std::size_t max_answer_tokens = 64;
    std::size_t workers = 1;
};

int cmd_rank(const RankOptions& o) {
    const auto samples = load_samples(o.dataset);
    std::vector<std::string> warnings;
    std::optional<VectorStore> store;
    std::optional<SentenceVectors> sentences;
    std::optional<ScoreTable> table;
    std::unique_ptr<Scorer> scorer;
    if (o.scorer == "cosine") {
        if (o.vectors.empty()) {
            throw UsageError("--scorer cosine needs --vectors");
        }
        store = VectorStore::load(o.vectors, o.dim, &warnings);
        scorer = std::make_unique<WordVectorScorer>(*store, o.max_answer_tokens);
    } else if (o.scorer == "sentence-import") {
        if (o.vectors.empty()) {
            throw UsageError("--scorer sentence-import needs --vectors");
        }
        sentences = SentenceVectors::load(o.vectors);
        scorer = std::make_unique<SentenceVectorScorer>(*sentences, o.max_answer_tokens);
    } else if (o.scorer == "bm25") {
        scorer = std::make_unique<Bm25Scorer>(o.bm25);
    } else if (o.scorer == "external") {
        if (o.scores.empty()) {
            throw UsageError("--scorer external needs --scores");
        }
        table = ScoreTable::load(o.scores);
        const auto missing = table->missing_pairs(samples);
        if (!missing.empty()) {
            for (const auto& m : missing) {
                std::cerr << "missing score: " << m << '\n';
            }
            throw UsageError(std::to_string(missing.size()) + " candidate(s) without a score");
        }
        scorer = std::make_unique<ExternalScorer>(*table);
    } else {
        throw UsageError("unknown scorer: " + o.scorer);
    }
    print_warnings(warnings);

    const auto lists = rank_all(samples, *scorer, o.workers);
    std::size_t unscored = 0;
    for (const auto& l : lists) {
        unscored += l.unscored();
    }
    OutputSet outputs;
    write_ranked(outputs.open(o.out), lists);
    outputs.commit();
    if (unscored > 0) {
        std::cerr << "warning: " << unscored << " candidate(s) could not be scored and were ranked last\n";
    }
    std::cout << "ranked " << lists.size() << " samples with " << scorer->name() << '\n';
    return 0;
}

int cmd_eval(const std::string& ranked_path, const std::string& out_prefix, const std::vector<std::size_t>& ks,
             const std::vector<double>& thresholds) {
    if (thresholds.size() != 2 || thresholds[0] > thresholds[1]) {
        throw UsageError("--thresholds takes two values, low <= high");
    }
    auto in = open_input(ranked_path);
    const auto lists = read_ranked(in);
    const auto report = evaluate(lists, ks, thresholds[0], thresholds[1]);
    const auto table = format_report_table(report);
    if (!out_prefix.empty()) {
        OutputSet outputs;
        write_report_jsonl(outputs.open(out_prefix + ".jsonl"), report);
        outputs.open(out_prefix + ".txt") << table;
        write_histogram_csv(outputs.open(out_prefix + ".histogram.csv"), report);
        outputs.commit();
    }
    std::cout << table;
    return 0;
}

int cmd_export(const std::string& dataset, const std::string& out, bool blind, std::size_t max_answer_tokens) {
    const auto samples = load_samples(dataset);
    OutputSet outputs;
    write_exchange(outputs.open(out), samples, blind, max_answer_tokens);
    outputs.commit();
    std::size_t pairs = 0;
    for (const auto& s : samples) {
        pairs += s.candidates.size();
    }
    std::cout << "exported " << pairs << " pairs from " << samples.size() << " samples\n";
    return 0;
}

int cmd_import(const std::string& dataset, const std::string& scores) {
    const auto samples = load_samples(dataset);
    const auto table = ScoreTable::load(scores);
    const auto missing = table.missing_pairs(samples);
    if (!missing.empty()) {
        for (const auto& m : missing) {
            std::cerr << "missing score: " << m << '\n';
        }
        throw UsageError(std::to_string(missing.size()) + " candidate(s) without a score");
    }
    std::cout << "score file covers all " << table.size() << " pairs\n";
    return 0;
}

int cmd_stats(const std::string& dataset, bool fold_partial) {
    std::cout << format_stats_table(compute_stats(load_samples(dataset)), fold_partial);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Follow-up question bank: confounder generation, ranking and evaluation"};
    app.set_config("--config", "", "TOML/INI file with option defaults");
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    GenerateOptions gen;
    auto* generate = app.add_subcommand("generate", "Build samples with confounders from a corpus");
    generate->add_option("--corpus", gen.corpus, "Conversation line records")->required()->check(CLI::ExistingFile);
    generate->add_option("--out-dir", gen.out_dir, "Directory for dataset.jsonl, audit.jsonl, stats.txt")->required();
    generate->add_option("--seed", gen.seed, "Run seed (required)");
    generate->add_option("--catalog", gen.catalog, "Entity catalog, surface<TAB>type")->check(CLI::ExistingFile);
    generate->add_option("--first-names", gen.first_names, "First-name list for partial entity matches")
        ->check(CLI::ExistingFile);
    generate->add_option("--last-names", gen.last_names, "Last-name list for partial entity matches")
        ->check(CLI::ExistingFile);
    generate->add_option("--paraphrases", gen.paraphrases, "Paraphrase import, {question, paraphrase} records")
        ->check(CLI::ExistingFile);
    generate->add_flag("--no-rule-paraphrases", gen.no_rule_paraphrases, "Disable the template paraphraser");
    generate->add_option("--lexicon", gen.lexicon, "Word list for local homophone lookup")->check(CLI::ExistingFile);
    generate->add_option("--homophone-url", gen.homophone_url, "Sounds-like service base URL");
    generate->add_option("--homophone-cache", gen.homophone_cache, "Cache directory for remote lookups");
    generate->add_option("--max-edit", gen.max_edit, "Edit-distance bound for homophones");
    generate->add_option("--generators", gen.generators, "Comma-separated subset of generators");
    generate->add_option("--random-count", gen.random_count, "Random questions per sample");
    generate->add_option("--max-swaps", gen.max_swaps, "Entity swaps per sample");
    generate->add_option("--duplicate-policy", gen.duplicate_policy, "current_only | all_context_questions");
    generate->add_flag("--target-history", gen.target_history, "Entity generators also rewrite history questions");
    generate->add_flag("--fold-partial", gen.fold_partial, "Report partial entity matches as irrelevant entity");
    generate->add_option("--workers", gen.workers, "Worker threads")->check(CLI::PositiveNumber);

    std::string bank_path, corpus_path, index_out;
    Bm25Params index_params;
    auto* index = app.add_subcommand("index", "Build a BM25 index over a question bank");
    index->add_option("--bank", bank_path, "Question bank, {doc_id, text, conversation_id} records")
        ->check(CLI::ExistingFile);
    index->add_option("--corpus", corpus_path, "Index every rewritten question of a corpus")
        ->check(CLI::ExistingFile);
    index->add_option("--out", index_out, "Index file")->required();
    index->add_option("--k1", index_params.k1, "BM25 k1");
    index->add_option("--b", index_params.b, "BM25 b");

    std::string search_index, query;
    std::size_t search_k = 20;
    auto* search = app.add_subcommand("search", "Query a saved index");
    search->add_option("--index", search_index, "Index file")->required()->check(CLI::ExistingFile);
    search->add_option("--query", query, "Query text")->required();
    search->add_option("--k", search_k, "Number of hits")->check(CLI::PositiveNumber);

    RankOptions rank_opts;
    auto* rank_cmd = app.add_subcommand("rank", "Score and order each sample's candidates");
    rank_cmd->add_option("--dataset", rank_opts.dataset, "Sample line records")->required()->check(CLI::ExistingFile);
    rank_cmd->add_option("--out", rank_opts.out, "Ranked output")->required();
    rank_cmd->add_option("--scorer", rank_opts.scorer, "Scorer")
        ->check(CLI::IsMember({"cosine", "bm25", "external", "sentence-import"}));
    rank_cmd->add_option("--vectors", rank_opts.vectors, "Word vectors (cosine) or sentence vectors (sentence-import)")
        ->check(CLI::ExistingFile);
    rank_cmd->add_option("--dim", rank_opts.dim, "Word-vector dimension")->check(CLI::PositiveNumber);
    rank_cmd->add_option("--scores", rank_opts.scores, "Score file for the external scorer")
        ->check(CLI::ExistingFile);
    rank_cmd->add_option("--k1", rank_opts.bm25.k1, "BM25 k1");
    rank_cmd->add_option("--b", rank_opts.bm25.b, "BM25 b");
    rank_cmd->add_option("--max-answer-tokens", rank_opts.max_answer_tokens, "Answer truncation");
    rank_cmd->add_option("--workers", rank_opts.workers, "Worker threads")->check(CLI::PositiveNumber);

    std::string ranked_path, report_prefix;
    std::vector<std::size_t> ks{1, 3};
    std::vector<double> thresholds{0.1, 0.4};
    auto* eval_cmd = app.add_subcommand("eval", "MRR, HitRatio@k and score distributions");
    eval_cmd->add_option("--ranked", ranked_path, "Ranked output")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--out-prefix", report_prefix, "Writes <prefix>.jsonl, .txt and .histogram.csv");
    eval_cmd->add_option("--k", ks, "HitRatio cut-offs")->delimiter(',')->check(CLI::PositiveNumber);
    eval_cmd->add_option("--thresholds", thresholds, "Low and high score thresholds")->delimiter(',');

    std::string export_dataset, export_out;
    bool blind = false;
    std::size_t export_answer_tokens = 64;
    auto* export_cmd = app.add_subcommand("export-scoring", "Write the exchange file for an external scorer");
    export_cmd->add_option("--dataset", export_dataset, "Sample line records")->required()->check(CLI::ExistingFile);
    export_cmd->add_option("--out", export_out, "Exchange file")->required();
    export_cmd->add_flag("--blind", blind, "Omit labels");
    export_cmd->add_option("--max-answer-tokens", export_answer_tokens, "Answer truncation");

    std::string import_dataset, import_scores;
    auto* import_cmd = app.add_subcommand("import-scores", "Check that a score file covers a dataset");
    import_cmd->add_option("--dataset", import_dataset, "Sample line records")->required()->check(CLI::ExistingFile);
    import_cmd->add_option("--scores", import_scores, "Score file")->required()->check(CLI::ExistingFile);

    std::string stats_dataset;
    bool stats_fold = false;
    auto* stats = app.add_subcommand("stats", "Dataset accounting table");
    stats->add_option("--dataset", stats_dataset, "Sample line records")->required()->check(CLI::ExistingFile);
    stats->add_flag("--fold-partial", stats_fold, "Report partial entity matches as irrelevant entity");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*generate) {
            return cmd_generate(gen);
        }
        if (*index) {
            return cmd_index(bank_path, corpus_path, index_out, index_params);
        }
        if (*search) {
            return cmd_search(search_index, query, search_k);
        }
        if (*rank_cmd) {
            return cmd_rank(rank_opts);
        }
        if (*eval_cmd) {
            return cmd_eval(ranked_path, report_prefix, ks, thresholds);
        }
        if (*export_cmd) {
            return cmd_export(export_dataset, export_out, blind, export_answer_tokens);
        }
        if (*import_cmd) {
            return cmd_import(import_dataset, import_scores);
        }
        if (*stats) {
            return cmd_stats(stats_dataset, stats_fold);
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
