#include <gtest/gtest.h>

#include <cmath>

#include "common.hpp"
#include "jobmatch/rng.hpp"
#include "jobmatch/errors.hpp"
#include "jobmatch/eval.hpp"
#include "jobmatch/semantic_match.hpp"

using namespace jobmatch;

namespace {

EmbeddingVector vec(std::vector<double> v) { return EmbeddingVector(std::move(v)); }

NormalizedDoc ingest(const std::string& s) { return ingest_document(s, InputFormat::sectioned, jmtest::pii_rules()); }

}  // namespace

TEST(Cosine, KnownValues) {
    EXPECT_DOUBLE_EQ(cosine(vec({1, 0, 0}), vec({0, 1, 0})), 0.0);
    EXPECT_NEAR(cosine(vec({1, 0}), vec({1, 1})), 0.70710678, 1e-8);
    EXPECT_DOUBLE_EQ(cosine(vec({3, 4}), vec({3, 4})), 1.0);
    EXPECT_DOUBLE_EQ(cosine(vec({1, 2}), vec({-1, -2})), -1.0);
}

TEST(Cosine, Errors) {
    EXPECT_THROW(cosine(vec({1, 0}), vec({1, 0, 0})), std::invalid_argument);
    EXPECT_THROW(cosine(vec({0, 0}), vec({1, 0})), std::invalid_argument);
}

TEST(Cosine, SymmetryScaleAndSelf) {
    SplitMix64 rng(3);
    for (int t = 0; t < 500; ++t) {
        std::vector<double> a(16), b(16);
        for (auto& x : a) x = rng.normal();
        for (auto& x : b) x = rng.normal();
        const double ab = cosine(vec(a), vec(b));
        EXPECT_EQ(ab, cosine(vec(b), vec(a)));
        EXPECT_GE(ab, -1.0);
        EXPECT_LE(ab, 1.0);
        EXPECT_NEAR(cosine(vec(a), vec(a)), 1.0, 1e-9);
        for (double s : {0.5, 2.0, 1000.0}) {
            std::vector<double> sa = a;
            for (auto& x : sa) x *= s;
            EXPECT_NEAR(cosine(vec(sa), vec(b)), ab, 1e-9);
        }
    }
}

TEST(EmbeddingVector, CachedNorm) {
    const EmbeddingVector v = vec({3, 4});
    EXPECT_DOUBLE_EQ(v.norm(), 5.0);
    EXPECT_EQ(v.dimension(), 2u);
}

TEST(DecideSemantic, TieRuleAndRange) {
    EXPECT_EQ(decide_semantic(0.70, 0.70), Decision::advance);
    EXPECT_EQ(decide_semantic(0.59, 0.60), Decision::reject);
    EXPECT_THROW(decide_semantic(0.5, 1.0000001), std::invalid_argument);
    EXPECT_THROW(decide_semantic(0.5, -1.5), std::invalid_argument);
}

TEST(Embed, UnitNormDefaultDimension) {
    const auto& p = jmtest::default_corpus()[0];
    const EmbeddingVector v = embed(ingest(p.resume_text), jmtest::ontology(), EmbedderConfig{});
    EXPECT_EQ(v.dimension(), 256u);
    EXPECT_NEAR(v.norm(), 1.0, 1e-9);
}

TEST(Embed, EmptyDocIsUnembeddable) {
    EXPECT_THROW(embed(normalize(""), jmtest::ontology(), EmbedderConfig{}), UnembeddableDocument);
    EmbedderConfig ngram;
    ngram.kind = EmbedderKind::ngram_hash;
    EXPECT_THROW(embed(normalize(""), jmtest::ontology(), ngram), UnembeddableDocument);
}

TEST(Embed, SurfaceFormsCollapseWithoutNgrams) {
    EmbedderConfig c;
    c.ngram_weight = 0.0;
    const auto x = embed(normalize("ML and SQL"), jmtest::ontology(), c);
    const auto y = embed(normalize("predictive modeling with relational queries"), jmtest::ontology(), c);
    EXPECT_EQ(x, y);
}

TEST(Embed, ConceptVectorsAreSeededUnitVectors) {
    EmbedderConfig c;
    const LocalEmbedder e(jmtest::ontology(), c);
    const auto& v = e.concept_vector("sql");
    double n = 0;
    for (double x : v) n += x * x;
    EXPECT_NEAR(std::sqrt(n), 1.0, 1e-12);
    c.model_seed = 1;
    const LocalEmbedder other(jmtest::ontology(), c);
    EXPECT_NE(other.concept_vector("sql"), v);
    EXPECT_EQ(LocalEmbedder(jmtest::ontology(), EmbedderConfig{}).concept_vector("sql"), v);
}

TEST(Embed, DeterministicAndBatchMatchesSingle) {
    const LocalEmbedder e(jmtest::ontology(), EmbedderConfig{});
    std::vector<NormalizedDoc> docs;
    for (std::size_t i = 0; i < 40; ++i) docs.push_back(ingest(jmtest::default_corpus()[i].resume_text));
    const auto batch = e.embed_batch(docs, 4);
    for (std::size_t i = 0; i < docs.size(); ++i) {
        EXPECT_EQ(batch[i], e.embed(docs[i]));
        EXPECT_EQ(batch[i], embed(docs[i], jmtest::ontology(), EmbedderConfig{}));
    }
}

TEST(Embed, ConfigValidation) {
    EmbedderConfig c;
    c.dimension = 0;
    EXPECT_THROW(validate(c), std::invalid_argument);
    c = {};
    c.concept_weight = 0;
    c.ngram_weight = 0;
    EXPECT_THROW(validate(c), std::invalid_argument);
    c = {};
    c.ngram_weight = -1;
    EXPECT_THROW(validate(c), std::invalid_argument);
    c = {};
    c.kind = EmbedderKind::remote;
    EXPECT_THROW(validate(c), std::invalid_argument);  // no endpoint
}

// Synonym stability: swapping surface forms barely moves the score, and the
// perturbed resume stays closer to its own job than to a far-miss job.
TEST(Embed, SynonymStability) {
    const Ontology& o = jmtest::ontology();
    EmbedderConfig c;  // ngram/concept = 0.1
    const LocalEmbedder e(o, c);
    const NoiseLevel syn_only{"synonym", 1.0, 0.0, 0.0};
    const auto& corpus = jmtest::default_corpus();
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& p = corpus[i];
        const LabeledPair q = perturb(p, o, syn_only, 1000 + i);
        const auto job = e.embed(ingest(p.job.text));
        const double before = cosine(e.embed(ingest(p.resume_text)), job);
        const auto perturbed = e.embed(ingest(q.resume_text));
        const double after = cosine(perturbed, job);
        ASSERT_LT(std::abs(after - before), 0.05) << p.pair_id;

        // a job from a domain none of the resume's concepts belong to
        const LabeledPair* far = nullptr;
        for (std::size_t j = 1; j < corpus.size() && !far; ++j) {
            const auto& cand = corpus[(i + j) % corpus.size()];
            bool disjoint = true;
            for (const auto& id : cand.job.required_concepts)
                for (const auto& mine : p.resume_profile.concept_ids)
                    disjoint = disjoint && o.at(id).domain_tag != o.at(mine).domain_tag;
            for (const auto& id : cand.job.optional_concepts)
                for (const auto& mine : p.resume_profile.concept_ids)
                    disjoint = disjoint && o.at(id).domain_tag != o.at(mine).domain_tag;
            if (disjoint) far = &cand;
        }
        if (!far || p.label != Label::qualified) continue;
        ASSERT_GT(after, cosine(perturbed, e.embed(ingest(far->job.text)))) << p.pair_id;
    }
}

TEST(Embed, BothDecisionsAtSeventy) {
    const auto& corpus = jmtest::default_corpus("medium");
    const EvalContext ctx{jmtest::ontology(), jmtest::pii_rules(), 1};
    const auto out = run_screen(corpus, SemanticScreener{EmbedderConfig{}, 0.70}, ctx);
    std::size_t adv = 0;
    for (const auto& o : out) adv += o.decision == Decision::advance;
    EXPECT_GT(adv, 0u);
    EXPECT_LT(adv, out.size());
}
