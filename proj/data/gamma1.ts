term h(f(x,y),g(z,w),f(y,x))
term m(g(z,w),f(y,x))
term g(f(x,y),g(z,w))
term f(g(z,w),f(y,x))
