term f(g1(h1(x1,x2)),h2(x1,x2),h3(x1,x2))
term f(g2(h1(x1,x2)),h2(x1,x2),h3(x1,x2))
term f(g3(h1(x1,x2)),h2(x1,x2),h3(x1,x2))
