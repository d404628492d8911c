term h(g(f(z),y),x)
term l(f(z))
term l(z)
