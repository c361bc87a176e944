// Writes a planted synthetic corpus as train/dev JSONL.
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "aqa/error.hpp"
#include "aqa/pipeline.hpp"
#include "aqa/synthetic.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Planted-corpus generator"};
    aqa::SyntheticSpec spec;
    std::string out_dir = ".";
    double dev_fraction = 0.25;
    app.add_option("-o,--out", out_dir, "directory receiving train.jsonl and dev.jsonl");
    app.add_option("-n,--num-examples", spec.num_examples);
    app.add_option("--seed", spec.seed);
    app.add_option("--dev-fraction", dev_fraction);
    app.add_option("--inflected-rate", spec.inflected_rate);
    app.add_option("--gap", spec.gap);
    app.add_option("--distractor-repeats", spec.distractor_repeats);
    app.add_option("--topic-repeats", spec.topic_repeats);
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error usage: " << e.what() << '\n';
        return 2;
    }
    try {
        auto corpus = aqa::generate_synthetic_split(spec, dev_fraction);
        aqa::write_dataset(corpus.train, out_dir + "/train.jsonl");
        aqa::write_dataset(corpus.dev, out_dir + "/dev.jsonl");
        std::cout << corpus.train.size() << " train, " << corpus.dev.size() << " dev\n";
    } catch (const aqa::Error& e) {
        std::cerr << "error " << aqa::to_string(e.kind()) << ": " << e.what() << '\n';
        return 2;
    }
    return 0;
}
