term f(g1(h1),h2,h3)
term f(g2(h1),h2,h3)
term f(g3(h1),h2,h3)
