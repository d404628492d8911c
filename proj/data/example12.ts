term f(f(x1,x2),f(x2,x1))
term g(g(x1,x2),g(x2,x1))
