// Batch front end: one config file in, CSV reports out.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <wsturm/errors.hpp>
#include <wsturm/parallel.hpp>

#include "commands.hpp"
#include "config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"weighted Sturm-Liouville solver and density admissibility diagnostics"};

    std::string config_path;
    int quad_degree = -1;
    int threads = -1;
    std::string out_prefix;
    app.add_option("config", config_path, "problem configuration file (JSON)")->required();
    app.add_option("--quad-degree", quad_degree, "override the quadrature exactness degree");
    app.add_option("--threads", threads, "worker threads for element loops");
    app.add_option("--out", out_prefix, "override the output path prefix");

    CLI11_PARSE(app, argc, argv);

    wsturm::cli::RunConfig config;
    try {
        config = wsturm::cli::load_config(config_path);
        if (quad_degree > 0) config.quadrature_degree = quad_degree;
        if (threads > 0) config.threads = threads;
        if (!out_prefix.empty()) config.output_prefix = out_prefix;
    } catch (const wsturm::cli::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return wsturm::cli::exit_config;
    }

    try {
        wsturm::set_thread_count(config.threads);
        return wsturm::cli::execute(config);
    } catch (const wsturm::admissibility_error& e) {
        std::cerr << "admissibility failure: " << e.what() << "\n";
        return wsturm::cli::exit_admissibility;
    } catch (const wsturm::cli::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return wsturm::cli::exit_config;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return wsturm::cli::exit_solver;
    }
}
