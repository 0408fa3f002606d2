public class MaxOfTwo {
    //@ ensures \result >= a;
    public int maxOfTwo(int a, int b) {
        if (a >= b) {
            return a;
        } else {
            return b;
        }
    }
}
