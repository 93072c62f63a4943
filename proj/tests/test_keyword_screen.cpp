#include <gtest/gtest.h>

#include "common.hpp"
#include "jobmatch/keyword_screen.hpp"
#include "jobmatch/text.hpp"

using namespace jobmatch;

namespace {

NormalizedDoc doc(const std::string& s) { return normalize(s); }

JobSpec job_of(std::vector<std::string> req) {
    JobSpec j;
    j.required_concepts = std::move(req);
    std::sort(j.required_concepts.begin(), j.required_concepts.end());
    j.title_concept = j.required_concepts.front();
    return j;
}

RuleSet rules_of(std::vector<std::vector<std::string>> terms, double tau = 0.75) {
    RuleSet r;
    for (auto& t : terms) r.terms.push_back({std::move(t), 1.0, false});
    r.threshold = tau;
    return r;
}

}  // namespace

TEST(KeywordCompile, CanonicalNamesOnly) {
    const RuleSet r = compile_rules(job_of({"machine-learning"}), jmtest::ontology());
    ASSERT_EQ(r.terms.size(), 1u);
    EXPECT_EQ(r.terms[0].tokens, (std::vector<std::string>{"machine", "learning"}));
    EXPECT_TRUE(r.terms[0].hard);
}

TEST(KeywordCompile, HardFraction) {
    const auto& p = jmtest::default_corpus()[0];
    KeywordOptions none;
    none.hard_fraction = 0.0;
    for (const auto& t : compile_rules(p.job, jmtest::ontology(), none).terms) EXPECT_FALSE(t.hard);

    for (const auto& q : jmtest::default_corpus()) {
        const RuleSet r = compile_rules(q.job, jmtest::ontology());
        ASSERT_EQ(r.terms.size(), q.job.required_concepts.size());
        const std::size_t n = r.terms.size();
        for (std::size_t i = 0; i < n; ++i) {
            ASSERT_EQ(r.terms[i].weight, 1.0);
            ASSERT_EQ(r.terms[i].hard, i < (n + 1) / 2);
            ASSERT_EQ(text::join(r.terms[i].tokens),
                      text::key(jmtest::ontology().at(q.job.required_concepts[i]).canonical_name));
        }
    }
}

TEST(KeywordScore, Formula) {
    const RuleSet r = rules_of({{"sql"}, {"excel"}, {"tableau"}, {"python"}});
    EXPECT_DOUBLE_EQ(score_keyword(doc("SQL and Excel"), r), 0.5);
    EXPECT_DOUBLE_EQ(score_keyword(doc(""), r), 0.0);
    EXPECT_DOUBLE_EQ(score_keyword(doc("python tableau excel sql"), r), 1.0);

    RuleSet tf = rules_of({{"sql"}, {"excel"}});
    tf.mode = ScoringMode::term_frequency;
    EXPECT_DOUBLE_EQ(score_keyword(doc("sql sql sql sql sql excel"), tf), (1.0 + 1.0 / 3.0) / 2.0);

    RuleSet weighted = rules_of({{"sql"}, {"excel"}});
    weighted.terms[0].weight = 3.0;
    EXPECT_DOUBLE_EQ(score_keyword(doc("sql"), weighted), 0.75);
}

TEST(KeywordScore, ContiguityRequired) {
    const RuleSet r = rules_of({{"machine", "learning"}});
    EXPECT_DOUBLE_EQ(score_keyword(doc("machine learning"), r), 1.0);
    EXPECT_DOUBLE_EQ(score_keyword(doc("learning machine"), r), 0.0);
    EXPECT_DOUBLE_EQ(score_keyword(doc("machine and learning"), r), 0.0);
    EXPECT_EQ(count_occurrences({"a", "a", "a"}, {"a", "a"}), 2u);
}

TEST(KeywordDecide, TieAndHardTerms) {
    RuleSet r = rules_of({{"sql"}, {"excel"}, {"tableau"}, {"python"}}, 0.5);
    EXPECT_EQ(decide_keyword(doc("sql excel"), r), Decision::advance);  // score == tau
    r.terms[3].hard = true;
    EXPECT_EQ(decide_keyword(doc("sql excel"), r), Decision::reject);
    EXPECT_EQ(decide_keyword(doc("sql python"), r), Decision::advance);
    r.threshold = 0.7;
    EXPECT_EQ(decide_keyword(doc("sql excel tableau python"), r), Decision::advance);
}

TEST(KeywordDecide, SynonymSwapOfHardTermRejects) {
    const Ontology& o = jmtest::ontology();
    const JobSpec j = job_of({"machine-learning", "sql"});
    const RuleSet r = compile_rules(j, o);
    ASSERT_TRUE(r.terms[0].hard);
    const std::string canon = "Skilled in machine learning and SQL";
    EXPECT_EQ(decide_keyword(doc(canon), r), Decision::advance);
    const auto syn = o.surface_forms("machine-learning", VariantClass::synonym);
    ASSERT_FALSE(syn.empty());
    EXPECT_EQ(decide_keyword(doc("Skilled in " + syn[0] + " and SQL"), r), Decision::reject);
}

TEST(KeywordProperties, MonotoneAppendAndBrittleness) {
    const Ontology& o = jmtest::ontology();
    for (const auto& p : jmtest::default_corpus("medium")) {
        const RuleSet r = compile_rules(p.job, o);
        const NormalizedDoc d = doc(p.resume_text);
        const double s = score_keyword(d, r);
        const Decision dec = decide_keyword(d, r);
        ASSERT_EQ(decide_keyword(d, r), dec);
        for (const auto& id : p.job.required_concepts) {
            const NormalizedDoc more = doc(p.resume_text + "\n" + o.at(id).canonical_name + "\n");
            ASSERT_GE(score_keyword(more, r), s);
            if (dec == Decision::advance) ASSERT_EQ(decide_keyword(more, r), Decision::advance);
        }
        if (dec != Decision::advance) continue;
        // For each present hard term: if deleting it rejects, a synonym swap rejects too.
        for (std::size_t t = 0; t < r.terms.size(); ++t) {
            if (!r.terms[t].hard) continue;
            const auto& id = p.job.required_concepts[t];
            const std::string& name = o.at(id).canonical_name;
            const auto syn = o.surface_forms(id, VariantClass::synonym);
            std::string removed = p.resume_text, swapped = p.resume_text;
            bool hit = false;
            for (const auto& m : find_mentions(p.resume_text, o)) {
                if (m.concept_ptr->id != id) continue;
                if (text::key(p.resume_text.substr(m.begin, m.end - m.begin)) != text::key(name)) continue;
                removed.replace(m.begin, m.end - m.begin, std::string(m.end - m.begin, ' '));
                swapped = p.resume_text.substr(0, m.begin) + syn.at(0) + p.resume_text.substr(m.end);
                hit = true;
                break;
            }
            if (!hit) continue;
            if (decide_keyword(doc(removed), r) == Decision::reject)
                ASSERT_EQ(decide_keyword(doc(swapped), r), Decision::reject) << p.pair_id;
        }
    }
}

TEST(KeywordRules, JsonRoundTripAndValidation) {
    const RuleSet r = compile_rules(jmtest::default_corpus()[5].job, jmtest::ontology());
    const std::string line = serialize_rules(r);
    EXPECT_EQ(line.find('\n'), std::string::npos);
    EXPECT_EQ(parse_rules(line), r);
    RuleSet bad = r;
    bad.terms[0].weight = 0.0;
    EXPECT_THROW(validate(bad), std::invalid_argument);
    bad = r;
    bad.threshold = 1.5;
    EXPECT_THROW(validate(bad), std::invalid_argument);
    EXPECT_THROW(validate(RuleSet{}), std::invalid_argument);
}
