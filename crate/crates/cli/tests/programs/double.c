int main()
    //@ requires true;
    //@ ensures result == 20;
{
    int i = 0;
    int acc = 0;
    while (i < 10)
        //@ invariant 0 <= i && i <= 10 && acc == i + i;
    {
        acc = acc + 2;
        i = i + 1;
    }
    return acc;
}
