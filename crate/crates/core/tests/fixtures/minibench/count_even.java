public class CountEven {
    /*@ requires a != null;
      @ ensures \result >= 0;
      @*/
    public int countEven(int[] a) {
        int count = 0;
        for (int i = 0; i < a.length; i++) {
            if (a[i] % 2 == 0) {
                count++;
            } else {
                continue;
            }
        }
        return count;
    }
}
