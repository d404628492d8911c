term f(x,y)
term f(x,z)
term f(w,y)
term f(w,z)
