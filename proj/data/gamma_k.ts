term f(x0_0,x1_0,x2_0)
term f(x0_0,x1_1,x2_1)
term f(x0_0,x1_2,x2_2)
term f(x0_1,x1_0,x2_0)
term f(x0_1,x1_1,x2_1)
term f(x0_1,x1_2,x2_2)
term f(x0_2,x1_0,x2_0)
term f(x0_2,x1_1,x2_1)
term f(x0_2,x1_2,x2_2)
