#include "cminet/render.hpp"

#include "cminet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace cminet {

namespace {

constexpr double kCanvas = 800.0;
constexpr double kMargin = 70.0;

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::string svg_open(double width, double height) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" "
         "width=\"" + fixed(width) + "\" height=\"" + fixed(height) + "\" viewBox=\"0 0 " +
         fixed(width) + " " + fixed(height) + "\">\n<rect x=\"0\" y=\"0\" width=\"" +
         fixed(width) + "\" height=\"" + fixed(height) + "\" fill=\"white\"/>\n";
}

}  // namespace

std::vector<Point> force_layout(const Adjacency& adj, const std::vector<Eigen::Index>& nodes,
                                std::uint64_t seed, int iterations) {
  const std::size_t n = nodes.size();
  std::vector<Point> pos(n);
  std::mt19937_64 rng(seed);
  for (auto& p : pos) {
    p.x = unit(rng);
    p.y = unit(rng);
  }
  if (n < 2) {
    for (auto& p : pos) p = {0.5, 0.5};
    return pos;
  }

  const double k = std::sqrt(1.0 / static_cast<double>(n));
  const double t0 = 0.1;
  std::vector<Point> disp(n);
  for (int it = 0; it < iterations; ++it) {
    const double temperature = t0 * (1.0 - static_cast<double>(it) / iterations);
    std::fill(disp.begin(), disp.end(), Point{});
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        double dx = pos[a].x - pos[b].x;
        double dy = pos[a].y - pos[b].y;
        double dist = std::hypot(dx, dy);
        if (dist < 1e-9) {
          dx = 1e-9 * static_cast<double>(a + 1);
          dy = 1e-9 * static_cast<double>(b + 1);
          dist = std::hypot(dx, dy);
        }
        double force = k * k / dist;
        if (adj(nodes[a], nodes[b])) force -= dist * dist / k;
        const double fx = dx / dist * force;
        const double fy = dy / dist * force;
        disp[a].x += fx;
        disp[a].y += fy;
        disp[b].x -= fx;
        disp[b].y -= fy;
      }
    }
    for (std::size_t a = 0; a < n; ++a) {
      const double len = std::hypot(disp[a].x, disp[a].y);
      if (len <= 0.0) continue;
      const double step = std::min(len, temperature);
      pos[a].x += disp[a].x / len * step;
      pos[a].y += disp[a].y / len * step;
    }
  }

  double xmin = pos[0].x, xmax = pos[0].x, ymin = pos[0].y, ymax = pos[0].y;
  for (const auto& p : pos) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const double span = std::max({xmax - xmin, ymax - ymin, 1e-12});
  for (auto& p : pos) {
    p.x = 0.5 + (p.x - 0.5 * (xmin + xmax)) / span;
    p.y = 0.5 + (p.y - 0.5 * (ymin + ymax)) / span;
  }
  return pos;
}

std::string render_network_svg(const BinaryNetwork& net, std::uint64_t layout_seed,
                               const Eigen::MatrixXi* weights, const std::string& title) {
  const auto& adj = net.adjacency();
  std::vector<Eigen::Index> nodes;
  for (Eigen::Index i = 0; i < net.size(); ++i) {
    if (adj.row(i).sum() > 0) nodes.push_back(i);
  }

  std::string svg = svg_open(kCanvas, kCanvas);
  if (!title.empty()) {
    svg += "<text x=\"" + fixed(kCanvas / 2) + "\" y=\"30.00\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"18\">" + escape(title) + "</text>\n";
  }
  if (nodes.empty()) {
    svg += "<text x=\"" + fixed(kCanvas / 2) + "\" y=\"" + fixed(kCanvas / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\" "
           "fill=\"#555555\">no edges above threshold</text>\n</svg>\n";
    return svg;
  }

  const auto layout = force_layout(adj, nodes, layout_seed);
  std::vector<Point> screen(layout.size());
  const double inner = kCanvas - 2 * kMargin;
  for (std::size_t a = 0; a < layout.size(); ++a) {
    screen[a] = {kMargin + layout[a].x * inner, kMargin + layout[a].y * inner};
  }
  const int max_weight = weights ? std::max(1, weights->maxCoeff()) : 1;

  svg += "<g stroke=\"#4a6fa5\" stroke-opacity=\"0.7\" fill=\"none\">\n";
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    for (std::size_t b = a + 1; b < nodes.size(); ++b) {
      if (!adj(nodes[a], nodes[b])) continue;
      const int w = weights ? (*weights)(nodes[a], nodes[b]) : 1;
      const double width = 1.0 + 4.0 * static_cast<double>(w) / max_weight;
      svg += "<path d=\"M " + fixed(screen[a].x) + " " + fixed(screen[a].y) + " L " +
             fixed(screen[b].x) + " " + fixed(screen[b].y) + "\" stroke-width=\"" +
             fixed(width) + "\"/>\n";
    }
  }
  svg += "</g>\n<g fill=\"#e07b39\" stroke=\"#333333\">\n";
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    svg += "<circle cx=\"" + fixed(screen[a].x) + "\" cy=\"" + fixed(screen[a].y) +
           "\" r=\"7.00\"/>\n";
  }
  svg += "</g>\n<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#111111\">\n";
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    svg += "<text x=\"" + fixed(screen[a].x + 9) + "\" y=\"" + fixed(screen[a].y - 9) + "\">" +
           escape(net.taxa()[nodes[a]]) + "</text>\n";
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

std::string render_threshold_panel(const WeightedConsensus& c, int t, std::uint64_t layout_seed) {
  const auto net = threshold_network(c, t);
  const std::string title = "t = " + std::to_string(t) + ": " +
                            std::to_string(net.connected_node_count()) + " nodes, " +
                            std::to_string(net.edge_count()) + " edges";
  return render_network_svg(net, layout_seed, &c.weights, title);
}

std::string render_hamming_heatmap(const Eigen::MatrixXi& h,
                                   const std::vector<std::string>& labels) {
  const Eigen::Index m = h.rows();
  if (h.cols() != m || static_cast<Eigen::Index>(labels.size()) != m) {
    throw RenderError("heatmap matrix must be square and match its labels");
  }
  if (h != h.transpose()) throw RenderError("heatmap matrix is not symmetric");
  if ((h.diagonal().array() != 0).any()) throw RenderError("heatmap diagonal is not zero");

  constexpr double cell = 56.0;
  constexpr double offset = 150.0;
  const double size = offset + cell * static_cast<double>(m) + 20.0;
  const int max_value = m > 0 ? std::max(1, h.maxCoeff()) : 1;

  std::string svg = svg_open(size, size);
  svg += "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  for (Eigen::Index i = 0; i < m; ++i) {
    const double centre = offset + cell * (static_cast<double>(i) + 0.5);
    svg += "<text x=\"" + fixed(offset - 8) + "\" y=\"" + fixed(centre + 4) +
           "\" text-anchor=\"end\">" + escape(labels[i]) + "</text>\n";
    svg += "<text x=\"" + fixed(centre) + "\" y=\"" + fixed(offset - 8) +
           "\" text-anchor=\"start\" transform=\"rotate(-45 " + fixed(centre) + " " +
           fixed(offset - 8) + ")\">" + escape(labels[i]) + "</text>\n";
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const double f = static_cast<double>(h(i, j)) / max_value;
      const int r = static_cast<int>(std::lround(255 - f * (255 - 33)));
      const int g = static_cast<int>(std::lround(255 - f * (255 - 102)));
      const int b = static_cast<int>(std::lround(255 - f * (255 - 172)));
      char colour[8];
      std::snprintf(colour, sizeof colour, "#%02x%02x%02x", r, g, b);
      const double x = offset + cell * static_cast<double>(j);
      const double y = offset + cell * static_cast<double>(i);
      svg += "<rect x=\"" + fixed(x) + "\" y=\"" + fixed(y) + "\" width=\"" + fixed(cell) +
             "\" height=\"" + fixed(cell) + "\" fill=\"" + colour + "\" stroke=\"#999999\"/>\n";
      svg += "<text class=\"cell\" x=\"" + fixed(x + cell / 2) + "\" y=\"" +
             fixed(y + cell / 2 + 4) + "\" text-anchor=\"middle\" fill=\"" +
             (f > 0.6 ? "white" : "black") + "\">" + std::to_string(h(i, j)) + "</text>\n";
    }
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

}  // namespace cminet
