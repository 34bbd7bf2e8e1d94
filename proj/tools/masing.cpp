#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <masing/cli.hpp>

int main(int argc, char **argv)
{
    CLI::App app{"Geometric solutions of Monge-Ampere systems and their front singularities"};
    std::string command;
    std::string config_path;
    std::optional<int> order;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> backend;
    app.add_option("command", command, "build | verify | classify | mesh | sweep | pipeline (overrides config)");
    app.add_option("--config", config_path, "JSON job config")->required();
    app.add_option("--order", order, "truncation order N");
    app.add_option("--seed", seed, "sweep RNG seed");
    app.add_option("--out", out, "output directory");
    app.add_option("--backend", backend, "rational | float")->check(CLI::IsMember({"rational", "float"}));
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        auto j = masing::read_config_file(config_path);
        if (!command.empty()) {
            j["command"] = command;
        }
        if (order) {
            j["order"] = *order;
        }
        if (seed) {
            j["seed"] = *seed;
        }
        if (out) {
            j["out"] = *out;
        }
        if (backend) {
            j["backend"] = *backend;
        }
        return masing::run(masing::parse_job_config(j));
    } catch (const masing::config_error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
