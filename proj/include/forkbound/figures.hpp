#pragma once

#include <string>
#include <vector>

#include "forkbound/csv.hpp"

namespace forkbound {

// Data series behind the reference plots, reproduced analytically at the
// operating points hard-wired below:
//   fig2  single M|M|1, mu=1, lambda in {0.3,0.7}: exact tail vs the renewal
//         and the general stationary bound
//   fig3  fork-join growth with k: mean and 1e-6 quantile, lambda {0.3,0.5,0.7}
//   fig4  round-robin vs random thinning, lambda=4, mu=1, eps=1e-3, k in [5,30]
//   fig5  two-server load balancing, mu1=1, mu2 in [0.5,1], lambda {0.4,0.8}
//   fig6  (k,l) fork-join with deterministic arrivals rho_A=1.25, mu=1
//   fig7  two latency-rate servers: single / thinned / (2,1) over kappa
// A figure may comprise several tables (panels).
std::vector<CsvTable> make_figure(const std::string& name);

std::vector<std::string> figure_names();

}  // namespace forkbound
