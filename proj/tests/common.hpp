#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "jobmatch/corpusgen.hpp"
#include "jobmatch/ingest.hpp"
#include "jobmatch/ontology.hpp"

namespace jmtest {

inline const jobmatch::Ontology& ontology() {
    static const jobmatch::Ontology o = jobmatch::load_ontology_file(jobmatch::default_ontology_path());
    return o;
}

inline const jobmatch::PiiRules& pii_rules() {
    static const jobmatch::PiiRules r = jobmatch::load_pii_rules_file(jobmatch::default_pii_rules_path());
    return r;
}

inline jobmatch::CorpusConfig config(const std::string& noise = "none", std::size_t n = 1000) {
    jobmatch::CorpusConfig c;
    c.n_pairs = n;
    c.noise = jobmatch::noise_level(noise);
    return c;
}

// Default corpus (seed 42) at a noise level, cached per level.
inline const std::vector<jobmatch::LabeledPair>& default_corpus(const std::string& noise = "none") {
    static std::map<std::string, std::vector<jobmatch::LabeledPair>> cache;
    auto it = cache.find(noise);
    if (it == cache.end())
        it = cache.emplace(noise, jobmatch::generate_pairs(ontology(), config(noise), 42)).first;
    return it->second;
}

inline std::filesystem::path test_dir() { return JM_TEST_DIR; }

}  // namespace jmtest
